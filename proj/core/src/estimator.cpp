#include "decoyqkd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace decoyqkd {

namespace {

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

void require_intensities(double mu, double nu) {
    if (!(nu > 0.0 && mu > nu)) throw std::invalid_argument("decoy bound requires 0 < nu < mu");
}

}  // namespace

Bound q_nu_lower(double q_nu, Count n_nu_sent, double sigmas) {
    if (n_nu_sent == 0) throw std::invalid_argument("q_nu_lower: no decoy pulses sent");
    require_probability(q_nu, "q_nu");
    if (sigmas < 0.0) throw std::invalid_argument("q_nu_lower: sigmas must be non-negative");
    const double sd = std::sqrt(q_nu * (1.0 - q_nu) / static_cast<double>(n_nu_sent));
    Bound b;
    b.raw = q_nu - sigmas * sd;
    b.clamped = b.raw < 0.0;
    b.value = std::max(0.0, b.raw);
    return b;
}

double vacuum_yield_upper(double mu, double q_mu, double eps_mu) {
    constexpr double kVacuumErrorRate = 0.5;
    return eps_mu * q_mu * std::exp(mu) / kVacuumErrorRate;
}

double q1_lower_with_vacuum(double mu, double nu, double q_mu, double q_nu_lower, double y0_upper) {
    require_intensities(mu, nu);
    const double mu2 = mu * mu;
    const double nu2 = nu * nu;
    const double prefactor = mu2 * std::exp(-mu) / (mu * nu - nu2);
    const double bracket =
        q_nu_lower * std::exp(nu) - q_mu * std::exp(mu) * nu2 / mu2 - (mu2 - nu2) / mu2 * y0_upper;
    return prefactor * bracket;
}

Bound q1_lower(double mu, double nu, double q_mu, double q_nu_lower_value, double eps_mu) {
    require_probability(q_mu, "q_mu");
    require_probability(q_nu_lower_value, "q_nu_lower");
    require_probability(eps_mu, "eps_mu");
    Bound b;
    b.raw = q1_lower_with_vacuum(mu, nu, q_mu, q_nu_lower_value, vacuum_yield_upper(mu, q_mu, eps_mu));
    b.clamped = b.raw < 0.0;
    b.value = std::max(0.0, b.raw);
    return b;
}

double q1_lower_decoy_gain_variant(double mu, double nu, double q_mu, double q_nu, double q_nu_lower_value,
                                   double eps_mu) {
    require_intensities(mu, nu);
    const double mu2 = mu * mu;
    const double nu2 = nu * nu;
    const double prefactor = mu2 * std::exp(-mu) / (mu * nu - nu2);
    return prefactor * (q_nu_lower_value * std::exp(nu) - q_nu * std::exp(mu) * nu2 / mu2 -
                        (mu2 - nu2) / mu2 * vacuum_yield_upper(mu, q_mu, eps_mu));
}

std::optional<Bound> eps1_upper(double eps_mu, double q_mu, double q1_lower_value) {
    require_probability(eps_mu, "eps_mu");
    require_probability(q_mu, "q_mu");
    if (!(q1_lower_value > 0.0)) return std::nullopt;
    Bound b;
    b.raw = eps_mu * q_mu / q1_lower_value;
    b.clamped = b.raw > 0.5;
    b.value = std::min(0.5, b.raw);
    return b;
}

double expected_ratio(double mu, double nu, double eta, double y0) {
    const double denominator = mu * eta + y0;
    if (!(denominator > 0.0)) throw std::invalid_argument("expected_ratio: mu*eta + Y0 must be positive");
    return (nu * eta + y0) / denominator;
}

RatioBand statistical_ratio_band(const SessionTally& tally, double sigmas) {
    auto relative_variance = [](const ClassTally& t) {
        const double q = t.gain();
        if (t.sent == 0 || q <= 0.0) return std::numeric_limits<double>::infinity();
        return (1.0 - q) / (q * static_cast<double>(t.sent));
    };
    const double rel_sd = std::sqrt(relative_variance(tally.signal()) + relative_variance(tally.decoy()));
    return {sigmas * rel_sd, sigmas * rel_sd};
}

AlarmVerdict pns_alarm(double ratio_measured, double ratio_expected, double lower_tol, double upper_tol) {
    if (!(ratio_expected > 0.0)) throw std::invalid_argument("pns_alarm: expected ratio must be positive");
    if (ratio_measured < ratio_expected * (1.0 - lower_tol)) return AlarmVerdict::PnsSuspected;
    if (ratio_measured > ratio_expected * (1.0 + upper_tol)) return AlarmVerdict::ArtifactSuspected;
    return AlarmVerdict::Ok;
}

DecoyBounds compute_bounds(const SessionConfig& cfg, const SessionTally& tally) {
    const ClassTally& sig = tally.signal();
    const ClassTally& dec = tally.decoy();
    if (sig.sent == 0) throw std::invalid_argument("compute_bounds: no signal pulses sent");

    DecoyBounds out;
    out.sigma_used = cfg.bound_sigmas;
    const Bound qnl = q_nu_lower(dec.gain(), dec.sent, cfg.bound_sigmas);
    out.q_nu_lower = qnl.value;
    out.q_nu_clamped = qnl.clamped;

    const Bound q1 = q1_lower(cfg.mu, cfg.nu, sig.gain(), qnl.value, sig.error_rate());
    out.q1_lower = q1.value;
    out.q1_clamped = q1.clamped || q1.value == 0.0;

    if (const auto e1 = eps1_upper(sig.error_rate(), sig.gain(), q1.value)) {
        out.eps1_upper = e1->value;
        out.eps1_clamped = e1->clamped;
    }
    return out;
}

}  // namespace decoyqkd
