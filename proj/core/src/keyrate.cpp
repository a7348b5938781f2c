#include "decoyqkd/keyrate.hpp"

#include <cmath>
#include <stdexcept>

#include "decoyqkd/estimator.hpp"

namespace decoyqkd {

namespace {

Count floor_nonnegative(double x) {
    if (!(x > 0.0)) return 0;
    return static_cast<Count>(std::floor(x));
}

}  // namespace

double fec_efficiency(Count leaked_bits, Count n, double eps) {
    if (n == 0) throw std::invalid_argument("fec_efficiency: empty string");
    if (!(eps > 0.0 && eps < 0.5)) {
        throw std::invalid_argument("fec_efficiency: error rate must lie in (0, 0.5), Shannon cost is zero otherwise");
    }
    return static_cast<double>(leaked_bits) / (static_cast<double>(n) * binary_entropy(eps));
}

Count n1_sift_lower(double q1_lower, Count n_signal_sent) {
    return floor_nonnegative(0.5 * q1_lower * static_cast<double>(n_signal_sent));
}

Count secure_length(Count n_mu_sift, Count n_1_sift_lower, double eps_mu, double eps1_upper, double f_ec) {
    const double ec = static_cast<double>(n_mu_sift) * f_ec * binary_entropy(eps_mu);
    return floor_nonnegative(static_cast<double>(n_1_sift_lower) * (1.0 - binary_entropy(eps1_upper)) - ec);
}

Count secure_length_from_leak(Count leaked_bits, Count n_1_sift_lower, double eps1_upper) {
    return floor_nonnegative(static_cast<double>(n_1_sift_lower) * (1.0 - binary_entropy(eps1_upper)) -
                             static_cast<double>(leaked_bits));
}

KeyReport certify(const SessionConfig& cfg, const SessionTally& tally, Count pulses_emitted,
                  const DecoyBounds& bounds, const ReconciliationResult& reconciliation) {
    if (!(cfg.clock_rate_hz > 0.0)) throw std::invalid_argument("certify: clock rate must be positive");
    KeyReport r;
    r.seed = cfg.seed;
    r.config = cfg;
    r.tally = tally;
    r.pulses_emitted = pulses_emitted;
    r.detection_events = tally.clicked();
    r.q_mu = tally.signal().gain();
    r.q_nu = tally.decoy().gain();
    r.eps_mu = tally.signal().error_rate();
    r.eps_nu = tally.decoy().error_rate();
    r.bounds = bounds;
    r.session_seconds = static_cast<double>(pulses_emitted) / cfg.clock_rate_hz;

    r.n_mu_sift = tally.signal().sifted;
    r.n_1_sift_lower = n1_sift_lower(bounds.q1_lower, tally.signal().sent);
    r.leaked_bits = reconciliation.leaked_bits;
    r.verification_bits = reconciliation.verification_bits;
    r.reconciliation_verified = reconciliation.verified;

    if (bounds.usable()) {
        if (r.n_mu_sift > 0 && r.eps_mu > 0.0 && r.eps_mu < 0.5) {
            r.f_ec_achieved = fec_efficiency(r.leaked_bits, r.n_mu_sift, r.eps_mu);
            r.secure_length = secure_length(r.n_mu_sift, r.n_1_sift_lower, r.eps_mu, *bounds.eps1_upper,
                                            *r.f_ec_achieved);
        } else {
            r.secure_length = secure_length_from_leak(r.leaked_bits, r.n_1_sift_lower, *bounds.eps1_upper);
        }
    }
    r.rate_bps = r.session_seconds > 0.0 ? static_cast<double>(r.secure_length) / r.session_seconds : 0.0;

    r.ratio_measured = r.q_mu > 0.0 ? r.q_nu / r.q_mu : 0.0;
    r.ratio_expected = expected_ratio(cfg.mu, cfg.nu, cfg.system_efficiency(), cfg.dark_count_prob);
    const RatioBand band = statistical_ratio_band(tally, cfg.bound_sigmas);
    r.alarm = pns_alarm(r.ratio_measured, r.ratio_expected, cfg.alarm_lower_tol.value_or(band.lower_tol),
                        cfg.alarm_upper_tol.value_or(band.upper_tol));

    if (!bounds.usable()) {
        r.aborted = true;
        r.abort_reason = "single-photon gain bound is zero";
    } else if (r.alarm != AlarmVerdict::Ok) {
        r.aborted = true;
        r.abort_reason = std::string("ratio alarm: ") + to_string(r.alarm);
    } else if (!reconciliation.verified) {
        r.aborted = true;
        r.abort_reason = "reconciliation failed verification";
    } else if (r.secure_length <= r.verification_bits) {
        r.aborted = true;
        r.abort_reason = "no secure key after error correction";
    }
    r.key_length = r.aborted ? 0 : r.secure_length - r.verification_bits;
    return r;
}

}  // namespace decoyqkd
