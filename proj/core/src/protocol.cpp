#include "decoyqkd/protocol.hpp"

#include <stdexcept>
#include <string>

namespace decoyqkd {

Count SiftedBatch::error_count() const noexcept {
    Count e = 0;
    for (std::size_t i = 0; i < alice_bits.size(); ++i) e += alice_bits[i] != bob_bits[i] ? 1 : 0;
    return e;
}

SiftResult sift(std::span<const PulseRecord> pulses, std::span<const DetectionRecord> detections,
                std::optional<std::array<Count, 2>> sent) {
    if (pulses.size() != detections.size()) {
        throw std::invalid_argument("sift: " + std::to_string(pulses.size()) + " pulse records but " +
                                    std::to_string(detections.size()) + " detection records");
    }
    SiftResult out;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const PulseRecord& p = pulses[i];
        const DetectionRecord& d = detections[i];
        if (p.index != d.index) {
            throw std::invalid_argument("sift: misaligned streams at position " + std::to_string(i) + " (pulse " +
                                        std::to_string(p.index) + " vs detection " + std::to_string(d.index) + ")");
        }
        ClassTally& t = out.tally[p.cls];
        if (!sent) ++t.sent;
        if (!d.clicked) continue;
        ++t.clicked;
        if (!is_sifted(p, d)) continue;
        ++t.sifted;
        if (p.alice_bit != d.bob_bit) ++t.errors;
        SiftedBatch& b = out.batches[class_index(p.cls)];
        b.alice_bits.push_back(p.alice_bit);
        b.bob_bits.push_back(d.bob_bit);
        b.pulse_index.push_back(p.index);
    }
    if (sent) {
        for (std::size_t c = 0; c < 2; ++c) {
            if ((*sent)[c] < out.tally.by_class[c].clicked) {
                throw std::invalid_argument("sift: emitted count below click count for class " + std::to_string(c));
            }
            out.tally.by_class[c].sent = (*sent)[c];
        }
    }
    return out;
}

}  // namespace decoyqkd
