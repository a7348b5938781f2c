#pragma once

// Pulse-level physics: weak-coherent source, lossy fibre, PNS eavesdropper and
// threshold detector. The free functions are the reference operations; the
// PhotonSource and Detector classes precompute tables for the session loop
// and draw exactly the same way.

#include <array>
#include <cstdint>
#include <vector>

#include "decoyqkd/model.hpp"
#include "decoyqkd/random.hpp"

namespace decoyqkd {

template <class Urbg>
IntensityClass choose_class(double decoy_probability, Urbg& rng) {
    if (decoy_probability <= 0.0) return IntensityClass::Signal;
    if (decoy_probability >= 1.0) return IntensityClass::Decoy;
    return uniform01(rng) < decoy_probability ? IntensityClass::Decoy : IntensityClass::Signal;
}

/// Inverse-CDF Poisson sampler for the small means of attenuated laser pulses.
class PoissonSampler {
  public:
    explicit PoissonSampler(double mean);

    double mean() const noexcept { return mean_; }

    template <class Urbg>
    unsigned operator()(Urbg& rng) const {
        if (mean_ == 0.0) return 0;
        if (large_) return std::poisson_distribution<unsigned>(mean_)(rng);
        const double u = uniform01(rng);
        unsigned k = 0;
        while (k + 1 < cdf_.size() && u >= cdf_[k]) ++k;
        return k;
    }

  private:
    double mean_;
    bool large_ = false;
    std::vector<double> cdf_;
};

template <class Urbg>
unsigned sample_photon_number(double mean, Urbg& rng) {
    return PoissonSampler(mean)(rng);
}

/// Binomial thinning: each photon independently survives with `transmittance`.
template <class Urbg>
unsigned channel_transmit(unsigned photon_count, double transmittance, Urbg& rng) {
    if (transmittance >= 1.0) return photon_count;
    if (transmittance <= 0.0) return 0;
    unsigned survived = 0;
    for (unsigned i = 0; i < photon_count; ++i) survived += uniform01(rng) < transmittance ? 1u : 0u;
    return survived;
}

struct InterceptResult {
    unsigned forwarded = 0;
    // Forwarded over Eve's lossless line rather than the fibre.
    bool lossless = false;
};

namespace detail {
template <class Urbg>
bool coin(Urbg& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(rng) < p;
}
void reject_inactive_attack();
}  // namespace detail

template <class Urbg>
InterceptResult pns_intercept(unsigned photon_count, const AttackDescriptor& attack, Urbg& rng) {
    if (!attack.active()) detail::reject_inactive_attack();
    if (photon_count == 0) return {0, false};
    if (photon_count == 1) {
        if (detail::coin(rng, attack.block_fraction)) return {0, false};
        return {1, false};
    }
    if (detail::coin(rng, attack.split_fraction)) return {photon_count - 1, true};
    return {photon_count, false};
}

struct DetectionOutcome {
    bool clicked = false;
    // Bob's bit disagrees with Alice's in a matched basis.
    bool wrong_bit = false;
    DetectionCause cause = DetectionCause::Photon;
};

/// Threshold detector with dark counts, misalignment errors and one-gate
/// afterpulsing. `arrived_photons` have already passed the fibre (or Eve's
/// line); the detector applies Bob's internal loss and quantum efficiency.
class Detector {
  public:
    explicit Detector(const SessionConfig& cfg);

    double click_probability(unsigned arrived_photons, bool lossless, bool prior_click) const noexcept;

    template <class Urbg>
    DetectionOutcome operator()(unsigned arrived_photons, bool lossless, bool prior_click, Urbg& rng) const {
        const double p_photon = photon_probability(arrived_photons, lossless);
        const double p_after = prior_click ? afterpulse_ : 0.0;
        const double p_click = 1.0 - (1.0 - dark_) * (1.0 - p_after) * (1.0 - p_photon);
        const double u = uniform01(rng);
        if (!(u < p_click)) return {};

        DetectionOutcome out;
        out.clicked = true;
        // u is uniform on [0, p_click) here; split it by cause.
        if (u < p_photon) {
            out.cause = DetectionCause::Photon;
            out.wrong_bit = uniform01(rng) < optical_error_;
        } else {
            const double v = (u - p_photon) / (1.0 - p_photon);  // uniform on [0, 1-(1-Y0)(1-pap))
            out.cause = v < dark_ ? DetectionCause::Dark : DetectionCause::Afterpulse;
            out.wrong_bit = random_bit(rng) != 0;
        }
        return out;
    }

  private:
    double photon_probability(unsigned k, bool lossless) const noexcept {
        const auto& table = (lossless && bypass_bob_) ? miss_bypass_ : miss_;
        const double miss = k < table.size() ? table[k] : std::pow(table[1], static_cast<double>(k));
        return 1.0 - miss;
    }

    double dark_;
    double afterpulse_;
    double optical_error_;
    bool bypass_bob_;
    std::array<double, 32> miss_{};         // (1 - eta_receiver)^k
    std::array<double, 32> miss_bypass_{};  // (1 - eta_detector)^k
};

template <class Urbg>
DetectionOutcome detect(unsigned arrived_photons, bool lossless, const SessionConfig& cfg, bool prior_click,
                        Urbg& rng) {
    return Detector(cfg)(arrived_photons, lossless, prior_click, rng);
}

}  // namespace decoyqkd
