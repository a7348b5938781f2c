#include "decoyqkd/photonics.hpp"

#include <cmath>
#include <stdexcept>

namespace decoyqkd {

namespace {
constexpr double kLargeMean = 30.0;
}

PoissonSampler::PoissonSampler(double mean) : mean_(mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("PoissonSampler: mean must be >= 0");
    if (mean == 0.0) return;
    if (mean > kLargeMean) {
        large_ = true;
        return;
    }
    double pmf = std::exp(-mean);
    double cdf = pmf;
    cdf_.push_back(cdf);
    for (unsigned k = 1; 1.0 - cdf > 1e-17 && k < 200; ++k) {
        pmf *= mean / k;
        cdf += pmf;
        cdf_.push_back(cdf);
    }
    cdf_.push_back(1.0);
}

namespace detail {
void reject_inactive_attack() { throw std::invalid_argument("pns_intercept: attack kind is None"); }
}  // namespace detail

Detector::Detector(const SessionConfig& cfg)
    : dark_(cfg.dark_count_prob),
      afterpulse_(cfg.afterpulse_prob),
      optical_error_(cfg.optical_error_prob),
      bypass_bob_(cfg.attack.active() && cfg.attack.bypass_bob_loss) {
    const double eta = cfg.receiver_efficiency();
    const double eta_det = cfg.detector_efficiency;
    for (std::size_t k = 0; k < miss_.size(); ++k) {
        miss_[k] = std::pow(1.0 - eta, static_cast<double>(k));
        miss_bypass_[k] = std::pow(1.0 - eta_det, static_cast<double>(k));
    }
}

double Detector::click_probability(unsigned arrived_photons, bool lossless, bool prior_click) const noexcept {
    const double p_after = prior_click ? afterpulse_ : 0.0;
    return 1.0 - (1.0 - dark_) * (1.0 - p_after) * (1.0 - photon_probability(arrived_photons, lossless));
}

}  // namespace decoyqkd
