#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "decoyqkd/model.hpp"
#include "decoyqkd/random.hpp"
#include "oracles.hpp"

using namespace decoyqkd;

namespace {

bool names(const ConfigError& e, const std::string& field) {
    return std::find(e.fields().begin(), e.fields().end(), field) != e.fields().end();
}

ConfigError rejection(const SessionConfig& cfg) {
    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("config was accepted");
    return ConfigError("", {});
}

}  // namespace

TEST_CASE("default config validates and reproduces the system efficiency") {
    const SessionConfig cfg = validate_config(SessionConfig{});
    CHECK(cfg.mu == 0.425);
    CHECK(cfg.nu == 0.204);
    CHECK(cfg.decoy_probability == 0.25);
    CHECK(cfg.clock_rate_hz == 7.143e6);
    CHECK(cfg.system_efficiency() == doctest::Approx(1.95e-2).epsilon(1e-12));
    CHECK(cfg.channel_transmittance == doctest::Approx(std::pow(10.0, -0.47)).epsilon(1e-15));
    CHECK(cfg.bob_transmittance == doctest::Approx(std::pow(10.0, -0.25)).epsilon(1e-15));
}

TEST_CASE("equal intensities are rejected, naming mu") {
    SessionConfig cfg;
    cfg.mu = 0.2;
    cfg.nu = 0.2;
    const ConfigError e = rejection(cfg);
    CHECK(names(e, "mu"));
}

TEST_CASE("out-of-range probabilities are rejected") {
    SessionConfig cfg;
    cfg.decoy_probability = 1.2;
    CHECK(names(rejection(cfg), "decoy_probability"));

    cfg = SessionConfig{};
    cfg.dark_count_prob = -1e-5;
    CHECK(names(rejection(cfg), "dark_count_prob"));

    cfg = SessionConfig{};
    cfg.attack = AttackDescriptor::pns(1.5);
    CHECK(names(rejection(cfg), "attack.block_fraction"));
}

TEST_CASE("every violation is reported at once") {
    SessionConfig cfg;
    cfg.nu = 0.5;
    cfg.clock_rate_hz = 0.0;
    cfg.target_sifted_bits = 0;
    const ConfigError e = rejection(cfg);
    CHECK(names(e, "mu"));
    CHECK(names(e, "clock_rate_hz"));
    CHECK(names(e, "target_sifted_bits"));
}

TEST_CASE("dB losses are converted once at validation") {
    SessionConfig cfg;
    cfg.channel_loss_db = 4.7;
    cfg.bob_loss_db = 2.5;
    const SessionConfig v = validate_config(cfg);
    CHECK(v.channel_transmittance == doctest::Approx(0.3388).epsilon(1e-4 / 0.3388));
    CHECK(v.bob_transmittance == doctest::Approx(0.56234).epsilon(1e-5));
    CHECK_FALSE(v.channel_loss_db.has_value());
    CHECK_FALSE(v.bob_loss_db.has_value());

    cfg = SessionConfig{};
    cfg.channel_loss_db = -3.0;
    CHECK(names(rejection(cfg), "channel_loss_db"));
}

TEST_CASE("binary entropy: fixed points and the default error rate") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.0172) == doctest::Approx(0.12543).epsilon(1e-5 / 0.12543));
    CHECK(binary_entropy(0.0172) == doctest::Approx(static_cast<double>(oracle::h2(0.0172L))).epsilon(1e-13));
    CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("binary entropy is symmetric and concave") {
    Rng rng(101);
    for (int i = 0; i < 10000; ++i) {
        const double x = uniform01(rng);
        CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-12));
        const double a = uniform01(rng);
        const double b = uniform01(rng);
        CHECK(binary_entropy(0.5 * (a + b)) >= 0.5 * (binary_entropy(a) + binary_entropy(b)) - 1e-15);
    }
}

TEST_CASE("tally ratios stay in [0,1] and merging is associative and commutative") {
    Rng rng(7);
    auto random_tally = [&] {
        ClassTally t;
        t.sent = rng() % 100000;
        t.clicked = t.sent == 0 ? 0 : rng() % (t.sent + 1);
        t.sifted = t.clicked == 0 ? 0 : rng() % (t.clicked + 1);
        t.errors = t.sifted == 0 ? 0 : rng() % (t.sifted + 1);
        return t;
    };
    for (int i = 0; i < 1000; ++i) {
        const ClassTally a = random_tally();
        const ClassTally b = random_tally();
        const ClassTally c = random_tally();
        CHECK(a.consistent());
        CHECK(a.gain() >= 0.0);
        CHECK(a.gain() <= 1.0);
        CHECK(a.error_rate() >= 0.0);
        CHECK(a.error_rate() <= 1.0);
        CHECK((a + b) == (b + a));
        CHECK(((a + b) + c) == (a + (b + c)));
        CHECK((a + b).consistent());
    }
    CHECK(ClassTally{}.gain() == 0.0);
    CHECK(ClassTally{}.error_rate() == 0.0);
}

TEST_CASE("derived RNG streams are reproducible and distinct") {
    Rng a = derive_rng(42, {1, 0});
    Rng b = derive_rng(42, {1, 0});
    Rng c = derive_rng(42, {1, 1});
    Rng d = derive_rng(43, {1, 0});
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
    CHECK(derive_seed(5, 0) == derive_seed(5, 0));
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
}
