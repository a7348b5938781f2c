#include "decoyqkd/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "decoyqkd/estimator.hpp"
#include "decoyqkd/keyrate.hpp"

namespace decoyqkd {

namespace {

struct Outcome {
    double click = 0.0;
    double error = 0.0;  // joint probability of a click with a wrong bit
};

// k photons reaching Bob's box, each detected with probability eta.
Outcome detect_k(double k, double eta, const SessionConfig& cfg) {
    const double p_photon = 1.0 - std::pow(1.0 - eta, k);
    const double y0 = cfg.dark_count_prob;
    return {1.0 - (1.0 - y0) * (1.0 - p_photon), p_photon * cfg.optical_error_prob + (1.0 - p_photon) * y0 * 0.5};
}

Outcome attacked_pulse(unsigned n, const SessionConfig& cfg) {
    const AttackDescriptor& a = cfg.attack;
    const double eta_sys = cfg.system_efficiency();
    const double eta_lossless = a.bypass_bob_loss ? cfg.detector_efficiency : cfg.receiver_efficiency();
    auto mix = [](double w, Outcome x, Outcome y) {
        return Outcome{w * x.click + (1.0 - w) * y.click, w * x.error + (1.0 - w) * y.error};
    };
    if (n == 0) return detect_k(0, eta_sys, cfg);
    if (n == 1) return mix(a.block_fraction, detect_k(0, eta_sys, cfg), detect_k(1, eta_sys, cfg));
    return mix(a.split_fraction, detect_k(n - 1, eta_lossless, cfg), detect_k(n, eta_sys, cfg));
}

}  // namespace

ClassExpectation expected_class(const SessionConfig& cfg, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("expected_class: mean must be non-negative");
    Outcome total;
    if (!cfg.attack.active()) {
        // Poisson thinning: the arriving photon number is Poisson(mean eta).
        const double p_photon = 1.0 - std::exp(-mean * cfg.system_efficiency());
        const double y0 = cfg.dark_count_prob;
        total = {1.0 - (1.0 - y0) * (1.0 - p_photon),
                 p_photon * cfg.optical_error_prob + (1.0 - p_photon) * y0 * 0.5};
    } else {
        double pn = std::exp(-mean);
        double covered = 0.0;
        for (unsigned n = 0; n < 100000; ++n) {
            if (n > 0) pn *= mean / n;
            const Outcome o = attacked_pulse(n, cfg);
            total.click += pn * o.click;
            total.error += pn * o.error;
            covered += pn;
            if (n > mean && 1.0 - covered < 1e-15) break;
        }
    }
    ClassExpectation out;
    out.gain = total.click;
    out.error_rate = total.click > 0.0 ? total.error / total.click : 0.0;
    return out;
}

double seconds_for_sifted_bits(const SessionConfig& cfg, double sifted_bits) {
    const double pd = cfg.decoy_probability;
    const double per_pulse =
        0.5 * ((1.0 - pd) * expected_class(cfg, cfg.mu).gain + pd * expected_class(cfg, cfg.nu).gain);
    if (!(per_pulse > 0.0)) return std::numeric_limits<double>::infinity();
    return sifted_bits / per_pulse / cfg.clock_rate_hz;
}

RatePrediction predict_rate(const SessionConfig& cfg, double seconds) {
    if (!(seconds > 0.0)) throw std::invalid_argument("predict_rate: duration must be positive");
    const ClassExpectation sig = expected_class(cfg, cfg.mu);
    const ClassExpectation dec = expected_class(cfg, cfg.nu);
    const double pulses = seconds * cfg.clock_rate_hz;
    const double n_signal = (1.0 - cfg.decoy_probability) * pulses;
    const double n_decoy = cfg.decoy_probability * pulses;

    RatePrediction r;
    r.seconds = seconds;
    const double sd = std::isinf(seconds) ? 0.0 : std::sqrt(dec.gain * (1.0 - dec.gain) / n_decoy);
    r.q_nu_lower = std::max(0.0, dec.gain - cfg.bound_sigmas * sd);
    r.q1_lower = q1_lower(cfg.mu, cfg.nu, sig.gain, r.q_nu_lower, sig.error_rate).value;
    if (const auto e1 = eps1_upper(sig.error_rate, sig.gain, r.q1_lower)) r.eps1_upper = e1->value;
    if (!r.eps1_upper) return r;

    // Per signal pulse, so the infinite-duration limit stays finite.
    const double per_pulse_mu = 0.5 * sig.gain;
    const double per_pulse_1 = 0.5 * r.q1_lower;
    const double per_pulse = -per_pulse_mu * cfg.f_ec_assumed * binary_entropy(sig.error_rate) +
                             per_pulse_1 * (1.0 - binary_entropy(*r.eps1_upper));
    const double per_second = std::max(0.0, per_pulse) * (1.0 - cfg.decoy_probability) * cfg.clock_rate_hz;
    r.rate_bps = per_second;
    if (!std::isinf(seconds)) {
        r.n_mu_sift = per_pulse_mu * n_signal;
        r.n_1_sift_lower = per_pulse_1 * n_signal;
        r.secure_length = per_second * seconds;
    }
    return r;
}

AnalyticPrediction predict_analytic(const SessionConfig& cfg) {
    AnalyticPrediction p;
    const ClassExpectation sig = expected_class(cfg, cfg.mu);
    const ClassExpectation dec = expected_class(cfg, cfg.nu);
    p.q_mu = sig.gain;
    p.q_nu = dec.gain;
    p.eps_mu = sig.error_rate;
    p.eps_nu = dec.error_rate;
    p.ratio = sig.gain > 0.0 ? dec.gain / sig.gain : 0.0;
    // Nothing can ever click: no expected ratio, reported as 0.
    if (cfg.mu * cfg.system_efficiency() + cfg.dark_count_prob > 0.0) {
        p.ratio_expected = expected_ratio(cfg.mu, cfg.nu, cfg.system_efficiency(), cfg.dark_count_prob);
    }
    p.session_seconds = seconds_for_sifted_bits(cfg, static_cast<double>(cfg.target_sifted_bits));
    if (std::isfinite(p.session_seconds)) {
        p.detection_events = p.session_seconds * cfg.clock_rate_hz *
                             ((1.0 - cfg.decoy_probability) * sig.gain + cfg.decoy_probability * dec.gain);
        p.session = predict_rate(cfg, p.session_seconds);
    }
    p.asymptotic_rate_bps = predict_rate(cfg, std::numeric_limits<double>::infinity()).rate_bps;
    return p;
}

std::optional<double> solve_rate_matching_block_fraction(const SessionConfig& cfg) {
    SessionConfig clean = cfg;
    clean.attack = AttackDescriptor::none();
    const double target = expected_class(clean, cfg.mu).gain;

    auto gain_at = [&](double b) {
        SessionConfig c = cfg;
        c.attack = AttackDescriptor::pns(b, 1.0);
        c.attack.bypass_bob_loss = cfg.attack.bypass_bob_loss;
        return expected_class(c, cfg.mu).gain;
    };
    // The gain falls monotonically with the block fraction.
    double lo = 0.0;
    double hi = 1.0;
    if (gain_at(lo) < target || gain_at(hi) > target) return std::nullopt;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gain_at(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace decoyqkd
