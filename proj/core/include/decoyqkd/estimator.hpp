#pragma once

// Decoy-state estimation: statistical deflation of the decoy gain, the
// single-photon gain and error bounds, the expected decoy/signal gain ratio and
// the PNS / artifact alarm. Everything here is pure and deterministic.

#include "decoyqkd/model.hpp"

namespace decoyqkd {

/// A bound after clamping to its physical range. `raw` keeps the unclamped
/// value for auditing.
struct Bound {
    double value = 0.0;
    double raw = 0.0;
    bool clamped = false;
};

/// max(0, q_nu - sigmas * sqrt(q_nu (1 - q_nu) / n_nu_sent)).
Bound q_nu_lower(double q_nu, Count n_nu_sent, double sigmas);

/// Lower bound on the single-photon gain Q1 (joint probability that a signal
/// pulse carries exactly one photon and clicks):
///
///   Q1L = mu^2 e^-mu / (mu nu - nu^2)
///         * ( QnuL e^nu - Qmu e^mu nu^2/mu^2 - eps_mu Qmu e^mu (mu^2 - nu^2) / (mu^2 / 2) )
///
/// The last term is the vacuum contribution with Y0 bounded by the signal
/// errors at e0 = 1/2. Clamped at 0.
Bound q1_lower(double mu, double nu, double q_mu, double q_nu_lower, double eps_mu);

/// The same bound with an explicit upper bound on the vacuum yield Y0.
/// q1_lower is this with y0_upper = eps_mu Qmu e^mu / (1/2).
double q1_lower_with_vacuum(double mu, double nu, double q_mu, double q_nu_lower, double y0_upper);

/// Variant with the measured decoy gain Qnu (not Qmu) multiplying
/// e^mu nu^2/mu^2 in the second bracket term. Comparison only: on physical
/// inputs it exceeds Qmu itself, so it is never used to certify a key.
double q1_lower_decoy_gain_variant(double mu, double nu, double q_mu, double q_nu, double q_nu_lower,
                                   double eps_mu);

/// Upper bound on the vacuum yield implied by the signal error rate.
double vacuum_yield_upper(double mu, double q_mu, double eps_mu);

/// min(1/2, eps_mu Qmu / Q1L); unset when q1_lower is not positive.
std::optional<Bound> eps1_upper(double eps_mu, double q_mu, double q1_lower);

/// (nu eta + Y0) / (mu eta + Y0).
double expected_ratio(double mu, double nu, double eta, double y0);

struct RatioBand {
    double lower_tol = 0.0;
    double upper_tol = 0.0;
};

/// Relative `sigmas`-standard-deviation band of the measured Qnu/Qmu for the
/// given tallies (independent binomial gains).
RatioBand statistical_ratio_band(const SessionTally& tally, double sigmas);

AlarmVerdict pns_alarm(double ratio_measured, double ratio_expected, double lower_tol, double upper_tol);

/// Runs q_nu_lower, q1_lower and eps1_upper on a session's tallies.
DecoyBounds compute_bounds(const SessionConfig& cfg, const SessionTally& tally);

}  // namespace decoyqkd
