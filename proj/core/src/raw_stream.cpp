#include "decoyqkd/raw_stream.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace decoyqkd {

std::uint8_t pack_flags(const PulseRecord& p, const DetectionRecord& d) {
    std::uint8_t f = 0;
    f |= static_cast<std::uint8_t>(p.cls == IntensityClass::Decoy ? 1u : 0u);
    f |= static_cast<std::uint8_t>((d.clicked ? 1u : 0u) << 1);
    f |= static_cast<std::uint8_t>((p.alice_basis & 1u) << 2);
    f |= static_cast<std::uint8_t>((p.alice_bit & 1u) << 3);
    if (d.clicked) {
        f |= static_cast<std::uint8_t>((d.bob_basis & 1u) << 4);
        f |= static_cast<std::uint8_t>((d.bob_bit & 1u) << 5);
        f |= static_cast<std::uint8_t>((static_cast<unsigned>(d.cause) & 3u) << 6);
    }
    return f;
}

void unpack_flags(std::uint8_t f, PulseRecord& p, DetectionRecord& d) {
    p.cls = (f & 1u) ? IntensityClass::Decoy : IntensityClass::Signal;
    d.clicked = (f >> 1) & 1u;
    p.alice_basis = (f >> 2) & 1u;
    p.alice_bit = (f >> 3) & 1u;
    d.bob_basis = (f >> 4) & 1u;
    d.bob_bit = (f >> 5) & 1u;
    const unsigned cause = (f >> 6) & 3u;
    if (cause > 2) throw std::runtime_error("raw stream: invalid cause code 3");
    d.cause = static_cast<DetectionCause>(cause);
}

void write_raw_stream(std::ostream& out, std::span<const PulseRecord> pulses,
                      std::span<const DetectionRecord> detections) {
    if (pulses.size() != detections.size()) throw std::invalid_argument("write_raw_stream: stream lengths differ");
    std::array<char, kRawRecordBytes> rec{};
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        if (pulses[i].index != detections[i].index) {
            throw std::invalid_argument("write_raw_stream: misaligned at position " + std::to_string(i));
        }
        const Count idx = pulses[i].index;
        for (unsigned b = 0; b < 8; ++b) rec[b] = static_cast<char>((idx >> (8 * b)) & 0xffu);
        rec[8] = static_cast<char>(pack_flags(pulses[i], detections[i]));
        out.write(rec.data(), rec.size());
    }
}

RawStream read_raw_stream(std::istream& in) {
    RawStream s;
    std::array<unsigned char, kRawRecordBytes> rec{};
    for (;;) {
        in.read(reinterpret_cast<char*>(rec.data()), rec.size());
        const auto got = in.gcount();
        if (got == 0) break;
        if (got != static_cast<std::streamsize>(rec.size())) {
            throw std::runtime_error("raw stream: truncated record after " + std::to_string(s.pulses.size()) +
                                     " records");
        }
        PulseRecord p;
        DetectionRecord d;
        Count idx = 0;
        for (unsigned b = 0; b < 8; ++b) idx |= static_cast<Count>(rec[b]) << (8 * b);
        p.index = d.index = idx;
        unpack_flags(rec[8], p, d);
        s.pulses.push_back(p);
        s.detections.push_back(d);
    }
    return s;
}

}  // namespace decoyqkd
