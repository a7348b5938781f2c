#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace decoyqkd {

/// xoshiro256** (Blackman & Vigna). A UniformRandomBitGenerator; the session
/// loop draws several values per pulse and std::mt19937_64 dominated its cost.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::seed_seq& seq) {
        std::array<std::uint32_t, 8> words{};
        seq.generate(words.begin(), words.end());
        for (std::size_t i = 0; i < 4; ++i) {
            state_[i] = (std::uint64_t{words[2 * i]} << 32) | words[2 * i + 1];
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }
    explicit Xoshiro256(std::uint64_t seed) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        *this = Xoshiro256(seq);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = std::rotl(state_[3], 45);
        return result;
    }

    friend bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

  private:
    std::array<std::uint64_t, 4> state_{};
};

using Rng = Xoshiro256;

/// Independent stream for (root seed, stream labels...). Streams with distinct
/// label tuples are decorrelated through std::seed_seq.
inline Rng derive_rng(std::uint64_t root, std::initializer_list<std::uint64_t> labels) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * labels.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(root);
    for (auto l : labels) push(l);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

/// 64-bit seed for a child (e.g. one campaign session).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t child) {
    Rng r = derive_rng(root, {0x5e55'1000ULL, child});
    return r();
}

/// Uniform double in [0,1) with 53 random bits.
template <class Urbg>
inline double uniform01(Urbg& rng) {
    static_assert(Urbg::max() - Urbg::min() == std::numeric_limits<std::uint64_t>::max(),
                  "uniform01 expects a full 64-bit generator");
    return static_cast<double>((rng() - Urbg::min()) >> 11) * 0x1.0p-53;
}

template <class Urbg>
inline bool bernoulli(Urbg& rng, double p) {
    return uniform01(rng) < p;
}

template <class Urbg>
inline std::uint8_t random_bit(Urbg& rng) {
    return static_cast<std::uint8_t>((rng() - Urbg::min()) >> 63);
}

}  // namespace decoyqkd
