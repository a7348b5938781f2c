#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "decoyqkd/keyrate.hpp"
#include "decoyqkd/reconciliation.hpp"

using namespace decoyqkd;

namespace {

struct Pair {
    std::vector<std::uint8_t> alice;
    std::vector<std::uint8_t> bob;
    std::size_t errors = 0;
};

Pair noisy_pair(std::size_t n, double qber, std::uint64_t seed) {
    Rng rng(seed);
    Pair p;
    p.alice.resize(n);
    p.bob.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.alice[i] = random_bit(rng);
        const bool flip = bernoulli(rng, qber);
        p.bob[i] = static_cast<std::uint8_t>(p.alice[i] ^ (flip ? 1 : 0));
        p.errors += flip ? 1 : 0;
    }
    return p;
}

std::size_t mismatches(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m += a[i] != b[i] ? 1 : 0;
    return m;
}

}  // namespace

TEST_CASE("first block size heuristic") {
    CHECK(cascade_first_block_size(0.0172) == 43);
    CHECK(cascade_first_block_size(0.073) == 10);
    CHECK_THROWS_AS(cascade_first_block_size(0.0), std::invalid_argument);
    CHECK_THROWS_AS(cascade_first_block_size(0.5), std::invalid_argument);
}

TEST_CASE("identical strings: no corrections, only top-level parities leak") {
    const Pair p = noisy_pair(10000, 0.0, 1);
    Rng rng(2);
    const ReconciliationResult r = cascade_reconcile(p.alice, p.bob, 0.0172, rng);
    CHECK(r.corrections == 0);
    CHECK(r.corrected_bits == p.alice);
    Count blocks = 0;
    for (std::size_t k = 43, pass = 0; pass < 4; ++pass, k *= 2) blocks += (10000 + k - 1) / k;
    CHECK(r.leaked_bits == blocks);
    CHECK(r.passes == 4);
    CHECK(r.verified);
    CHECK(r.verification_bits == 64);
}

TEST_CASE("one error in an 8-bit block: one block parity plus three bisection parities") {
    std::vector<std::uint8_t> alice{1, 0, 1, 1, 0, 0, 1, 0};
    std::vector<std::uint8_t> bob = alice;
    bob[5] ^= 1;
    Rng rng(3);
    CascadeOptions opts;
    opts.first_block_size = 8;
    const ReconciliationResult r = cascade_reconcile(alice, bob, 0.125, rng, opts);
    REQUIRE(r.leaked_per_pass.size() == 4);
    CHECK(r.leaked_per_pass[0] == 4);
    CHECK(r.corrections == 1);
    CHECK(r.corrected_bits == alice);
}

TEST_CASE("input checks") {
    Rng rng(4);
    std::vector<std::uint8_t> a(10, 0), b(11, 0);
    CHECK_THROWS_AS(cascade_reconcile(a, b, 0.02, rng), std::invalid_argument);
    CHECK_THROWS_AS(cascade_reconcile(a, a, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(cascade_reconcile(a, a, 0.6, rng), std::invalid_argument);
}

TEST_CASE("one million bits at 1.72% QBER: exact correction, efficiency at most 1.15") {
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
        const Pair p = noisy_pair(1'000'000, 0.0172, seed);
        Rng rng(seed + 100);
        const ReconciliationResult r = cascade_reconcile(p.alice, p.bob, 0.0172, rng);
        CHECK(mismatches(r.corrected_bits, p.alice) == 0);
        CHECK(r.verified);
        CHECK(r.corrections >= p.errors);
        const double f = fec_efficiency(r.leaked_bits, p.alice.size(), 0.0172);
        CHECK(f <= 1.15);
        CHECK(f >= 1.0);
    }
}

TEST_CASE("residual errors in at most 1 of 1000 runs on 1e5-bit blocks") {
    int failures = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const Pair p = noisy_pair(100'000, 0.0172, 5000 + t);
        Rng rng(9000 + t);
        const ReconciliationResult r = cascade_reconcile(p.alice, p.bob, 0.0172, rng);
        const bool wrong = mismatches(r.corrected_bits, p.alice) != 0;
        failures += wrong ? 1 : 0;
        // Verification never passes a wrong string here.
        if (wrong) CHECK_FALSE(r.verified);
    }
    CHECK(failures <= 1);
}

TEST_CASE("leak grows with the true error count") {
    double previous = 0.0;
    for (double q : {0.005, 0.01, 0.02, 0.04}) {
        double sum = 0.0;
        for (std::uint64_t t = 0; t < 10; ++t) {
            const Pair p = noisy_pair(50'000, q, 700 + t);
            Rng rng(800 + t);
            sum += static_cast<double>(cascade_reconcile(p.alice, p.bob, 0.0172, rng).leaked_bits);
        }
        CHECK(sum / 10 > previous);
        previous = sum / 10;
    }
}

TEST_CASE("polynomial hash separates single-bit changes") {
    Rng rng(6);
    std::vector<std::uint8_t> bits(4096);
    for (auto& b : bits) b = random_bit(rng);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t key = rng() >> 3;
        std::vector<std::uint8_t> other = bits;
        other[rng() % other.size()] ^= 1;
        CHECK(polynomial_hash(bits, key) != polynomial_hash(other, key));
        CHECK(polynomial_hash(bits, key) == polynomial_hash(bits, key));
    }
}
