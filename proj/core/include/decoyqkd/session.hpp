#pragma once

// Pulse-stream Monte-Carlo of one QKD session.
//
// The stream is cut into fixed-size blocks. Each block draws from RNG streams
// derived from (seed, block index), so a session is bit-identical for any
// worker count. Afterpulse memory does not cross block boundaries.

#include <stdexcept>
#include <vector>

#include "decoyqkd/model.hpp"

namespace decoyqkd {

class SessionAborted : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SessionOptions {
    unsigned workers = 0;  // 0: hardware concurrency
    Count block_size = Count{1} << 20;
    // Keep a record for every emitted pulse instead of clicked pulses only.
    bool record_all_pulses = false;
    // Abort if nothing has been sifted after this many pulses.
    Count zero_sift_budget = 50'000'000;
    // Abort if the target is not reached within this many pulses.
    Count max_pulses = 400'000'000'000;
};

struct SessionResult {
    // Index-aligned. Clicked pulses only unless record_all_pulses was set.
    std::vector<PulseRecord> pulses;
    std::vector<DetectionRecord> detections;
    SessionTally tally;
    Count pulses_emitted = 0;
    double elapsed_seconds = 0.0;
};

/// Emits pulses until the combined (signal + decoy) sifted count reaches
/// cfg.target_sifted_bits. `cfg` must already be validated.
SessionResult run_session(const SessionConfig& cfg, const SessionOptions& options = {});

}  // namespace decoyqkd
