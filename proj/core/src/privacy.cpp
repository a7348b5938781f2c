#include "decoyqkd/privacy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace decoyqkd {

namespace {

using Word = std::uint64_t;

// 64x64 -> 128 bit carry-less product, {low, high}.
struct Wide {
    Word lo;
    Word hi;
};

Wide clmul_portable(Word a, Word b) {
    Word lo = 0;
    Word hi = 0;
    for (unsigned k = 0; k < 64; ++k) {
        if ((b >> k) & 1u) {
            lo ^= a << k;
            if (k != 0) hi ^= a >> (64 - k);
        }
    }
    return {lo, hi};
}

#if defined(__x86_64__)
__attribute__((target("pclmul,sse4.1"))) void base_hw(const Word* a, const Word* b, std::size_t len, Word* out) {
    for (std::size_t i = 0; i < len; ++i) {
        const __m128i ai = _mm_cvtsi64_si128(static_cast<long long>(a[i]));
        for (std::size_t j = 0; j < len; ++j) {
            const __m128i p = _mm_clmulepi64_si128(ai, _mm_cvtsi64_si128(static_cast<long long>(b[j])), 0x00);
            out[i + j] ^= static_cast<Word>(_mm_cvtsi128_si64(p));
            out[i + j + 1] ^= static_cast<Word>(_mm_extract_epi64(p, 1));
        }
    }
}

const bool kHaveClmul = __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("sse4.1");
#else
const bool kHaveClmul = false;
#endif

void base_portable(const Word* a, const Word* b, std::size_t len, Word* out) {
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = 0; j < len; ++j) {
            const Wide p = clmul_portable(a[i], b[j]);
            out[i + j] ^= p.lo;
            out[i + j + 1] ^= p.hi;
        }
    }
}

constexpr std::size_t kBaseWords = 16;

// out[0 .. 2 len) ^= a * b over GF(2)[z]; `scratch` needs 4 len words.
void karatsuba(const Word* a, const Word* b, std::size_t len, Word* out, Word* scratch) {
    if (len <= kBaseWords) {
#if defined(__x86_64__)
        if (kHaveClmul) {
            base_hw(a, b, len, out);
            return;
        }
#endif
        base_portable(a, b, len, out);
        return;
    }
    const std::size_t h = (len + 1) / 2;
    const std::size_t l = len - h;

    // z1 = (a0 + a1)(b0 + b1) + z0 + z2, placed at word offset h.
    Word* as = scratch;
    Word* bs = scratch + h;
    Word* z = scratch + 2 * h;  // 2h words
    Word* deeper = scratch + 4 * h;
    std::copy(a, a + h, as);
    std::copy(b, b + h, bs);
    for (std::size_t k = 0; k < l; ++k) {
        as[k] ^= a[h + k];
        bs[k] ^= b[h + k];
    }
    std::fill(z, z + 2 * h, Word{0});
    karatsuba(as, bs, h, z, deeper);

    // z0 and z2 go straight into out and are folded into z.
    std::vector<Word> z0(2 * h, 0);
    karatsuba(a, b, h, z0.data(), deeper);
    std::vector<Word> z2(2 * l + 1, 0);
    if (l != 0) karatsuba(a + h, b + h, l, z2.data(), deeper);

    for (std::size_t k = 0; k < 2 * h; ++k) {
        z[k] ^= z0[k];
        out[k] ^= z0[k];
    }
    for (std::size_t k = 0; k < 2 * l; ++k) {
        z[k] ^= z2[k];
        out[2 * h + k] ^= z2[k];
    }
    for (std::size_t k = 0; k < 2 * h; ++k) out[h + k] ^= z[k];
}

std::vector<Word> pack(std::span<const std::uint8_t> bits, std::size_t words) {
    std::vector<Word> out(words, 0);
    for (std::size_t k = 0; k < bits.size(); ++k) out[k / 64] |= static_cast<Word>(bits[k] & 1u) << (k % 64);
    return out;
}

}  // namespace

std::vector<std::uint8_t> privacy_amplify(std::span<const std::uint8_t> bits, std::size_t out_length,
                                          std::span<const std::uint8_t> hash_seed) {
    const std::size_t n = bits.size();
    if (out_length > n) {
        throw std::invalid_argument("privacy_amplify: output length " + std::to_string(out_length) +
                                    " exceeds input length " + std::to_string(n));
    }
    if (out_length == 0) return {};
    const std::size_t seed_bits = n + out_length - 1;
    if (hash_seed.size() < seed_bits) {
        throw std::invalid_argument("privacy_amplify: seed has " + std::to_string(hash_seed.size()) +
                                    " bits, needs " + std::to_string(seed_bits));
    }

    // (T x)_i = sum_j s[i + n - 1 - j] x[j] is coefficient i + n - 1 of the
    // polynomial product s(z) x(z).
    const std::size_t len = (seed_bits + 63) / 64;
    const std::vector<Word> s = pack(hash_seed.first(seed_bits), len);
    const std::vector<Word> x = pack(bits, len);
    std::vector<Word> product(2 * len + 1, 0);
    std::vector<Word> scratch(8 * len + 64, 0);
    karatsuba(s.data(), x.data(), len, product.data(), scratch.data());

    std::vector<std::uint8_t> y(out_length);
    for (std::size_t i = 0; i < out_length; ++i) {
        const std::size_t c = i + n - 1;
        y[i] = static_cast<std::uint8_t>((product[c / 64] >> (c % 64)) & 1u);
    }
    return y;
}

std::vector<std::uint8_t> toeplitz_seed(std::size_t n, std::size_t out_length, Rng& rng) {
    if (out_length == 0) return {};
    std::vector<std::uint8_t> seed(n + out_length - 1);
    Word w = 0;
    for (std::size_t k = 0; k < seed.size(); ++k) {
        if (k % 64 == 0) w = rng();
        seed[k] = static_cast<std::uint8_t>((w >> (k % 64)) & 1u);
    }
    return seed;
}

}  // namespace decoyqkd
