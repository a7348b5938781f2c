#pragma once

// Privacy amplification by Toeplitz hashing over GF(2).
//
// For an n-bit input x and an m-bit output, the seed s has n + m - 1 bits and
// defines T[i][j] = s[i - j + n - 1]. The output is y = T x.

#include <cstdint>
#include <span>
#include <vector>

#include "decoyqkd/random.hpp"

namespace decoyqkd {

/// Throws std::invalid_argument if out_length > bits.size() or the seed is
/// shorter than bits.size() + out_length - 1.
std::vector<std::uint8_t> privacy_amplify(std::span<const std::uint8_t> bits, std::size_t out_length,
                                          std::span<const std::uint8_t> hash_seed);

/// Uniform random seed of the right length for (n, m).
std::vector<std::uint8_t> toeplitz_seed(std::size_t n, std::size_t out_length, Rng& rng);

}  // namespace decoyqkd
