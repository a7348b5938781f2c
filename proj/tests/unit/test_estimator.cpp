#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "decoyqkd/estimator.hpp"
#include "decoyqkd/random.hpp"
#include "oracles.hpp"

using namespace decoyqkd;

namespace {

constexpr double kMu = 0.425;
constexpr double kNu = 0.204;
constexpr double kQmu = 8.3815e-3;
constexpr double kQnu = 4.072e-3;

// Expected counts of one default-size session (38.7 s at 7.143 MHz).
SessionTally default_scale_tally() {
    SessionTally t;
    const double pulses = 7.143e6 * 38.7;
    t[IntensityClass::Signal].sent = static_cast<Count>(0.75 * pulses);
    t[IntensityClass::Signal].clicked = static_cast<Count>(0.75 * pulses * kQmu);
    t[IntensityClass::Decoy].sent = static_cast<Count>(0.25 * pulses);
    t[IntensityClass::Decoy].clicked = static_cast<Count>(0.25 * pulses * kQnu);
    return t;
}

}  // namespace

TEST_CASE("decoy gain deflation") {
    CHECK(q_nu_lower(kQnu, 1000, 0.0).value == kQnu);
    const Bound b = q_nu_lower(kQnu, 69'000'000, 10.0);
    const double sd = oracle::binomial_sd(kQnu, 6.9e7);
    CHECK(b.value == doctest::Approx(kQnu - 10 * sd).epsilon(1e-12));
    CHECK(std::abs(b.value - 0.003995) < 1e-6);
    CHECK_FALSE(b.clamped);

    const Bound tiny = q_nu_lower(1e-4, 1000, 10.0);
    CHECK(tiny.value == 0.0);
    CHECK(tiny.clamped);
    CHECK(tiny.raw < 0.0);
    CHECK_THROWS_AS(q_nu_lower(kQnu, 0, 10.0), std::invalid_argument);
}

TEST_CASE("single-photon gain bound: worked values") {
    const Bound q1 = q1_lower(kMu, kNu, kQmu, kQnu, 0.0172);
    CHECK(std::abs(q1.value - 4.454e-3) <= 1e-6);
    CHECK_FALSE(q1.clamped);

    // Intermediate quantities from the oracle's own arithmetic.
    const long double prefactor = kMu * kMu * std::exp(-kMu) / (kMu * kNu - kNu * kNu);
    CHECK(static_cast<double>(prefactor) == doctest::Approx(2.6194).epsilon(1e-4));
    CHECK(static_cast<double>(oracle::q1_lower_raw(kMu, kNu, kQmu, kQnu, 0.0172) / prefactor) ==
          doctest::Approx(1.7003e-3).epsilon(1e-4));

    CHECK(std::abs(q1_lower(kMu, kNu, kQmu, kQnu, 0.0).value - 5.343e-3) <= 1e-6);
}

TEST_CASE("single-photon gain bound clamps a negative bracket") {
    const Bound q1 = q1_lower(kMu, kNu, 0.05, 0.0, 0.2);
    CHECK(q1.value == 0.0);
    CHECK(q1.clamped);
    CHECK(q1.raw < 0.0);
    CHECK_THROWS_AS(q1_lower(0.2, 0.2, kQmu, kQnu, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(q1_lower(0.2, 0.3, kQmu, kQnu, 0.01), std::invalid_argument);
}

TEST_CASE("single-photon gain bound agrees with the independent arrangement") {
    Rng rng(77);
    for (int i = 0; i < 10000; ++i) {
        const double mu = 0.05 + 0.95 * uniform01(rng);
        const double nu = mu * (0.01 + 0.98 * uniform01(rng));
        const double q_mu = uniform01(rng) * 0.2;
        const double q_nu_l = uniform01(rng) * 0.2;
        const double eps = 0.5 * uniform01(rng);
        const double lib = q1_lower(mu, nu, q_mu, q_nu_l, eps).raw;
        const long double ref = oracle::q1_lower_raw(mu, nu, q_mu, q_nu_l, eps);
        const long double scale = oracle::q1_lower_scale(mu, nu, q_mu, q_nu_l, eps);
        CHECK(static_cast<double>(std::fabs(lib - ref) / scale) <= 1e-12);
    }
}

TEST_CASE("single-photon gain bound: monotonicity") {
    Rng rng(78);
    for (int i = 0; i < 5000; ++i) {
        const double mu = 0.1 + 0.8 * uniform01(rng);
        const double nu = mu * (0.1 + 0.8 * uniform01(rng));
        const double q_mu = 1e-3 + 0.05 * uniform01(rng);
        const double q_nu_l = 1e-3 + 0.05 * uniform01(rng);
        const double eps = 0.2 * uniform01(rng);
        const double d = 1e-4;
        const double base = q1_lower(mu, nu, q_mu, q_nu_l, eps).raw;
        CHECK(q1_lower(mu, nu, q_mu, q_nu_l + d, eps).raw > base);
        CHECK(q1_lower(mu, nu, q_mu, q_nu_l, eps + d).raw < base);
        CHECK(q1_lower(mu, nu, q_mu + d, q_nu_l, eps).raw < base);
    }
}

TEST_CASE("decoy-gain variant of the bound is not physical") {
    // With Qnu in the second term the bound exceeds Qmu itself.
    const double v = q1_lower_decoy_gain_variant(kMu, kNu, kQmu, kQnu, kQnu, 0.0172);
    CHECK(v > kQmu);
}

TEST_CASE("single-photon error bound") {
    CHECK(eps1_upper(0.0, kQmu, 4.454e-3)->value == 0.0);
    CHECK(std::abs(eps1_upper(0.0172, kQmu, 4.454e-3)->value - 0.03236) <= 1e-4);
    CHECK(eps1_upper(0.0172, kQmu, kQmu)->value == doctest::Approx(0.0172));
    const auto clamped = eps1_upper(0.3, 0.01, 0.001);
    CHECK(clamped->value == 0.5);
    CHECK(clamped->clamped);
    CHECK_FALSE(eps1_upper(0.0172, kQmu, 0.0).has_value());
}

TEST_CASE("expected gain ratio") {
    CHECK(std::abs(expected_ratio(0.425, 0.204, 1.95e-2, 9.4e-5) - 0.486) <= 0.001);
    CHECK(expected_ratio(0.3, 0.3, 0.02, 1e-4) == doctest::Approx(1.0));
    CHECK(expected_ratio(0.425, 0.204, 0.0, 9.4e-5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(expected_ratio(0.425, 0.204, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("ratio alarm") {
    CHECK(pns_alarm(0.486, 0.486, 0.02, 0.02) == AlarmVerdict::Ok);

    const SessionTally t = default_scale_tally();
    const RatioBand band = statistical_ratio_band(t, 10.0);
    const double n_mu = t.signal().sent, n_nu = t.decoy().sent;
    const double qm = t.signal().gain(), qn = t.decoy().gain();
    const double rel = std::sqrt((1 - qm) / (qm * n_mu) + (1 - qn) / (qn * n_nu));
    CHECK(band.lower_tol == doctest::Approx(10 * rel).epsilon(1e-9));
    CHECK(band.upper_tol == doctest::Approx(10 * rel).epsilon(1e-9));

    CHECK(pns_alarm(0.403, 0.486, band.lower_tol, band.upper_tol) == AlarmVerdict::PnsSuspected);
    CHECK(0.55 > 0.486 * (1 + 10 * rel));
    CHECK(pns_alarm(0.55, 0.486, band.lower_tol, band.upper_tol) == AlarmVerdict::ArtifactSuspected);
    CHECK_THROWS_AS(pns_alarm(0.4, 0.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("bounds from a tally") {
    SessionConfig cfg;
    SessionTally t = default_scale_tally();
    t[IntensityClass::Signal].sifted = t.signal().clicked / 2;
    t[IntensityClass::Signal].errors = static_cast<Count>(0.0172 * t.signal().sifted);
    const DecoyBounds b = compute_bounds(cfg, t);
    CHECK(b.sigma_used == 10.0);
    CHECK(b.usable());
    CHECK(b.q_nu_lower == doctest::Approx(q_nu_lower(t.decoy().gain(), t.decoy().sent, 10).value));
    CHECK(b.q1_lower ==
          doctest::Approx(q1_lower(cfg.mu, cfg.nu, t.signal().gain(), b.q_nu_lower, t.signal().error_rate()).value));
    CHECK(*b.eps1_upper == doctest::Approx(t.signal().error_rate() * t.signal().gain() / b.q1_lower));

    SessionTally empty;
    empty[IntensityClass::Signal].sent = 100;
    empty[IntensityClass::Decoy].sent = 100;
    const DecoyBounds none = compute_bounds(cfg, empty);
    CHECK_FALSE(none.usable());
    CHECK_FALSE(none.eps1_upper.has_value());
}
