#pragma once

// Binary dump of pulse/detection records, one 9-byte record per pulse:
//
//   bytes 0-7  pulse index, unsigned little-endian
//   byte  8    flags
//              bit 0    class (0 signal, 1 decoy)
//              bit 1    clicked
//              bit 2    Alice's basis
//              bit 3    Alice's bit
//              bit 4    Bob's basis   (0 unless clicked)
//              bit 5    Bob's bit     (0 unless clicked)
//              bits 6-7 cause (0 photon, 1 dark, 2 afterpulse; 0 unless clicked)
//
// No header; the file length is a multiple of 9. See docs/raw-stream.md.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "decoyqkd/model.hpp"

namespace decoyqkd {

constexpr std::size_t kRawRecordBytes = 9;

std::uint8_t pack_flags(const PulseRecord& p, const DetectionRecord& d);
void unpack_flags(std::uint8_t flags, PulseRecord& p, DetectionRecord& d);

/// Throws std::invalid_argument on misaligned streams.
void write_raw_stream(std::ostream& out, std::span<const PulseRecord> pulses,
                      std::span<const DetectionRecord> detections);

struct RawStream {
    std::vector<PulseRecord> pulses;  // photon_count is not stored and reads 0
    std::vector<DetectionRecord> detections;
};

/// Throws std::runtime_error on a truncated record or an invalid cause code.
RawStream read_raw_stream(std::istream& in);

}  // namespace decoyqkd
