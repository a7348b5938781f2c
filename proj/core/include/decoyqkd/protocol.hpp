#pragma once

// BB84 bookkeeping: random bases and bits, sifting and per-class tallies.
// Sifting is a pure function of the pulse and detection streams.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "decoyqkd/model.hpp"
#include "decoyqkd/random.hpp"

namespace decoyqkd {

struct BasesAndBits {
    std::vector<std::uint8_t> bases;
    std::vector<std::uint8_t> bits;
};

template <class Urbg>
BasesAndBits assign_bases_and_bits(std::size_t n, Urbg& rng) {
    BasesAndBits out;
    out.bases.resize(n);
    out.bits.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.bases[i] = random_bit(rng);
        out.bits[i] = random_bit(rng);
    }
    return out;
}

inline bool is_sifted(const PulseRecord& p, const DetectionRecord& d) noexcept {
    return d.clicked && p.alice_basis == d.bob_basis;
}

inline bool is_sift_error(const PulseRecord& p, const DetectionRecord& d) noexcept {
    return is_sifted(p, d) && p.alice_bit != d.bob_bit;
}

/// Matched-basis bits of one intensity class, in pulse order.
struct SiftedBatch {
    IntensityClass cls = IntensityClass::Signal;
    std::vector<std::uint8_t> alice_bits;
    std::vector<std::uint8_t> bob_bits;
    std::vector<Count> pulse_index;

    std::size_t size() const noexcept { return alice_bits.size(); }
    Count error_count() const noexcept;
};

struct SiftResult {
    std::array<SiftedBatch, 2> batches{SiftedBatch{IntensityClass::Signal, {}, {}, {}},
                                       SiftedBatch{IntensityClass::Decoy, {}, {}, {}}};
    SessionTally tally;

    const SiftedBatch& operator[](IntensityClass c) const noexcept { return batches[class_index(c)]; }
};

/// Sifts index-aligned pulse/detection streams.
///
/// Dense streams (one record per emitted pulse) produce sent counts by
/// themselves. Sparse streams that only keep clicked pulses must pass the
/// per-class emitted counts in `sent`. Throws std::invalid_argument when the
/// streams are misaligned.
SiftResult sift(std::span<const PulseRecord> pulses, std::span<const DetectionRecord> detections,
                std::optional<std::array<Count, 2>> sent = std::nullopt);

}  // namespace decoyqkd
