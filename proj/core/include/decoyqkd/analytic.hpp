#pragma once

// Closed-form expectation of the Monte-Carlo model: gains and error rates per
// class, the decoy bounds evaluated on them and the resulting key rate. Used
// as the reference line for simulated campaigns and for the long-session end
// of the duration sweep. Afterpulsing is not modelled here.

#include <optional>

#include "decoyqkd/model.hpp"

namespace decoyqkd {

struct ClassExpectation {
    double gain = 0.0;
    double error_rate = 0.0;
};

/// Expected Q and QBER of a pulse class with mean photon number `mean`,
/// including the configured PNS attack if any.
ClassExpectation expected_class(const SessionConfig& cfg, double mean);

struct RatePrediction {
    double seconds = 0.0;
    double q_nu_lower = 0.0;
    double q1_lower = 0.0;
    std::optional<double> eps1_upper;
    double n_mu_sift = 0.0;
    double n_1_sift_lower = 0.0;
    double secure_length = 0.0;
    double rate_bps = 0.0;
};

/// Expected certificate for a session of the given simulated length, with
/// f_ec = cfg.f_ec_assumed and counts taken at their expected values.
RatePrediction predict_rate(const SessionConfig& cfg, double seconds);

struct AnalyticPrediction {
    double q_mu = 0.0;
    double q_nu = 0.0;
    double eps_mu = 0.0;
    double eps_nu = 0.0;
    double ratio = 0.0;
    double ratio_expected = 0.0;
    // Simulated time for cfg.target_sifted_bits and its certificate.
    double session_seconds = 0.0;
    double detection_events = 0.0;
    RatePrediction session;
    // Infinite-session limit (no statistical deflation).
    double asymptotic_rate_bps = 0.0;
};

AnalyticPrediction predict_analytic(const SessionConfig& cfg);

/// Seconds of simulated time needed to collect `sifted_bits` (both classes).
double seconds_for_sifted_bits(const SessionConfig& cfg, double sifted_bits);

/// Block fraction for a full-split PNS attack that leaves Q_mu at its
/// no-attack value ("Bob sees the usual detection rate"). Returns nullopt when
/// no fraction in [0,1] achieves it.
std::optional<double> solve_rate_matching_block_fraction(const SessionConfig& cfg);

}  // namespace decoyqkd
