#include "decoyqkd/session.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "decoyqkd/photonics.hpp"
#include "decoyqkd/protocol.hpp"

namespace decoyqkd {

namespace {

enum StreamLabel : std::uint64_t { kPhysics = 1, kClickedBits = 2, kDarkBits = 3 };

struct BlockOutput {
    std::vector<PulseRecord> pulses;
    std::vector<DetectionRecord> detections;
    SessionTally tally;
    Count emitted = 0;
};

class BlockSimulator {
  public:
    BlockSimulator(const SessionConfig& cfg, const SessionOptions& opts)
        : cfg_(cfg),
          opts_(opts),
          source_{PoissonSampler(cfg.mu), PoissonSampler(cfg.nu)},
          detector_(cfg) {}

    // Simulates block `block`, stopping early once `sift_limit` bits have been
    // sifted inside the block.
    BlockOutput run(Count block, Count sift_limit) const {
        Rng physics = derive_rng(cfg_.seed, {kPhysics, block});
        Rng clicked_bits = derive_rng(cfg_.seed, {kClickedBits, block});
        Rng quiet_bits = derive_rng(cfg_.seed, {kDarkBits, block});

        BlockOutput out;
        const Count first = block * opts_.block_size;
        const bool attacked = cfg_.attack.active();
        const bool afterpulsing = cfg_.afterpulse_prob > 0.0;
        Count sifted = 0;
        bool prior_click = false;

        for (Count i = 0; i < opts_.block_size; ++i) {
            const IntensityClass cls = choose_class(cfg_.decoy_probability, physics);
            const unsigned emitted = source_[class_index(cls)](physics);

            unsigned arrived;
            bool lossless = false;
            if (attacked) {
                const InterceptResult r = pns_intercept(emitted, cfg_.attack, physics);
                lossless = r.lossless;
                arrived = lossless ? r.forwarded : channel_transmit(r.forwarded, cfg_.channel_transmittance, physics);
            } else {
                arrived = channel_transmit(emitted, cfg_.channel_transmittance, physics);
            }
            const DetectionOutcome det = detector_(arrived, lossless, prior_click, physics);
            if (afterpulsing) prior_click = det.clicked;

            ClassTally& t = out.tally[cls];
            ++t.sent;
            ++out.emitted;

            if (det.clicked) {
                PulseRecord p{first + i, cls, static_cast<std::uint16_t>(std::min(emitted, 65535u)),
                              random_bit(clicked_bits), random_bit(clicked_bits)};
                DetectionRecord d{first + i, true, random_bit(clicked_bits), 0, det.cause};
                if (d.bob_basis == p.alice_basis) {
                    d.bob_bit = static_cast<std::uint8_t>(p.alice_bit ^ (det.wrong_bit ? 1 : 0));
                } else {
                    d.bob_bit = random_bit(clicked_bits);
                }
                ++t.clicked;
                if (is_sifted(p, d)) {
                    ++t.sifted;
                    ++sifted;
                    if (p.alice_bit != d.bob_bit) ++t.errors;
                }
                out.pulses.push_back(p);
                out.detections.push_back(d);
                if (sifted >= sift_limit) break;
            } else if (opts_.record_all_pulses) {
                out.pulses.push_back(PulseRecord{first + i, cls, static_cast<std::uint16_t>(std::min(emitted, 65535u)),
                                                 random_bit(quiet_bits), random_bit(quiet_bits)});
                out.detections.push_back(DetectionRecord{first + i, false, 0, 0, DetectionCause::Photon});
            }
        }
        return out;
    }

  private:
    const SessionConfig& cfg_;
    const SessionOptions& opts_;
    std::array<PoissonSampler, 2> source_;
    Detector detector_;
};

void append(SessionResult& into, BlockOutput&& block) {
    into.tally += block.tally;
    into.pulses_emitted += block.emitted;
    into.pulses.insert(into.pulses.end(), block.pulses.begin(), block.pulses.end());
    into.detections.insert(into.detections.end(), block.detections.begin(), block.detections.end());
}

}  // namespace

SessionResult run_session(const SessionConfig& cfg, const SessionOptions& options) {
    if (options.block_size == 0) throw std::invalid_argument("run_session: block_size must be positive");
    unsigned workers = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());

    const BlockSimulator sim(cfg, options);
    constexpr Count kUnlimited = std::numeric_limits<Count>::max();

    SessionResult result;
    Count block = 0;
    while (result.tally.sifted() < cfg.target_sifted_bits) {
        if (result.tally.sifted() == 0 && result.pulses_emitted >= options.zero_sift_budget) {
            throw SessionAborted("run_session: no sifted bits after " + std::to_string(result.pulses_emitted) +
                                 " pulses; the channel delivers nothing");
        }
        if (result.pulses_emitted >= options.max_pulses) {
            throw SessionAborted("run_session: pulse budget of " + std::to_string(options.max_pulses) +
                                 " exhausted with " + std::to_string(result.tally.sifted()) + " of " +
                                 std::to_string(cfg.target_sifted_bits) + " sifted bits");
        }
        const Count remaining = cfg.target_sifted_bits - result.tally.sifted();

        if (workers == 1) {
            append(result, sim.run(block++, remaining));
            continue;
        }

        std::vector<std::future<BlockOutput>> wave;
        wave.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            wave.push_back(std::async(std::launch::async, [&sim, b = block + w] { return sim.run(b, kUnlimited); }));
        }
        bool done = false;
        for (unsigned w = 0; w < workers; ++w) {
            BlockOutput out = wave[w].get();
            if (done) continue;
            const Count still_needed = cfg.target_sifted_bits - result.tally.sifted();
            if (out.tally.sifted() >= still_needed) {
                out = sim.run(block + w, still_needed);
                done = true;
            }
            append(result, std::move(out));
        }
        block += workers;
    }
    result.elapsed_seconds = static_cast<double>(result.pulses_emitted) / cfg.clock_rate_hz;
    return result;
}

}  // namespace decoyqkd
