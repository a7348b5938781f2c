#pragma once

// Cascade information reconciliation with exact leak accounting.
//
// Bob's string is corrected towards Alice's over a fixed number of passes.
// Pass 1 cuts the string into blocks of ceil(0.73 / qber); every later pass
// doubles the block size over a fresh random permutation shared by both
// parties. Each odd-parity block is bisected (one disclosed parity per step)
// and every correction is cascaded back into the blocks of earlier passes
// that contain the flipped bit. A final polynomial hash verifies the result.

#include <cstdint>
#include <span>
#include <vector>

#include "decoyqkd/model.hpp"
#include "decoyqkd/random.hpp"

namespace decoyqkd {

struct CascadeOptions {
    unsigned passes = 4;
    // 0: derive from the QBER estimate as ceil(0.73 / qber).
    std::size_t first_block_size = 0;
    bool verify = true;
};

struct ReconciliationResult {
    std::vector<std::uint8_t> corrected_bits;
    // Parity bits disclosed by Alice (block parities plus bisection steps).
    Count leaked_bits = 0;
    std::vector<Count> leaked_per_pass;
    // Size of the verification hash, disclosed in addition to leaked_bits.
    Count verification_bits = 0;
    unsigned passes = 0;
    Count corrections = 0;
    bool verified = false;
    // Probability that a mismatch survives undetected: the hash collision
    // bound when verification succeeds, 1 when it fails.
    double residual_error_estimate = 1.0;
};

std::size_t cascade_first_block_size(double qber_estimate);

/// Shared randomness (permutations and the hash key) comes from `rng`.
/// Throws std::invalid_argument on a length mismatch or qber outside (0, 0.5).
ReconciliationResult cascade_reconcile(std::span<const std::uint8_t> alice_bits,
                                       std::span<const std::uint8_t> bob_bits, double qber_estimate, Rng& rng,
                                       const CascadeOptions& options = {});

/// Polynomial hash of a bit string modulo 2^61 - 1 at the point `key`.
std::uint64_t polynomial_hash(std::span<const std::uint8_t> bits, std::uint64_t key);

}  // namespace decoyqkd
