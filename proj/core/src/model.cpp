#include "decoyqkd/model.hpp"

#include <sstream>

namespace decoyqkd {

const char* to_string(IntensityClass c) noexcept { return c == IntensityClass::Signal ? "signal" : "decoy"; }

const char* to_string(DetectionCause c) noexcept {
    switch (c) {
        case DetectionCause::Photon: return "photon";
        case DetectionCause::Dark: return "dark";
        case DetectionCause::Afterpulse: return "afterpulse";
    }
    return "unknown";
}

const char* to_string(AlarmVerdict v) noexcept {
    switch (v) {
        case AlarmVerdict::Ok: return "ok";
        case AlarmVerdict::PnsSuspected: return "pns_suspected";
        case AlarmVerdict::ArtifactSuspected: return "artifact_suspected";
    }
    return "unknown";
}

double db_to_transmittance(double loss_db) noexcept { return std::pow(10.0, -loss_db / 10.0); }

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

class Violations {
  public:
    void require(bool ok, const char* field, const std::string& what) {
        if (ok) return;
        fields_.emplace_back(field);
        if (!message_.empty()) message_ += "; ";
        message_ += std::string(field) + ": " + what;
    }
    void probability(double p, const char* field) {
        require(p >= 0.0 && p <= 1.0, field, "must lie in [0,1]");
    }
    void throw_if_any() const {
        if (!fields_.empty()) throw ConfigError("invalid session config: " + message_, fields_);
    }

  private:
    std::vector<std::string> fields_;
    std::string message_;
};

std::string str(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

SessionConfig validate_config(SessionConfig cfg) {
    Violations v;

    if (cfg.channel_loss_db) {
        v.require(std::isfinite(*cfg.channel_loss_db) && *cfg.channel_loss_db >= 0.0, "channel_loss_db",
                  "must be a non-negative number of dB");
        cfg.channel_transmittance = db_to_transmittance(*cfg.channel_loss_db);
        cfg.channel_loss_db.reset();
    }
    if (cfg.bob_loss_db) {
        v.require(std::isfinite(*cfg.bob_loss_db) && *cfg.bob_loss_db >= 0.0, "bob_loss_db",
                  "must be a non-negative number of dB");
        cfg.bob_transmittance = db_to_transmittance(*cfg.bob_loss_db);
        cfg.bob_loss_db.reset();
    }

    v.require(cfg.nu > 0.0, "nu", "must be positive (got " + str(cfg.nu) + ")");
    v.require(cfg.mu > cfg.nu, "mu", "must exceed nu (mu=" + str(cfg.mu) + ", nu=" + str(cfg.nu) +
                                         "); the decoy bound divides by mu*nu - nu^2");
    v.require(std::isfinite(cfg.mu), "mu", "must be finite");
    v.require(cfg.decoy_probability > 0.0 && cfg.decoy_probability < 1.0, "decoy_probability",
              "must lie strictly inside (0,1) (got " + str(cfg.decoy_probability) + ")");
    v.require(cfg.clock_rate_hz > 0.0 && std::isfinite(cfg.clock_rate_hz), "clock_rate_hz", "must be positive");

    v.probability(cfg.channel_transmittance, "channel_transmittance");
    v.probability(cfg.bob_transmittance, "bob_transmittance");
    v.probability(cfg.detector_efficiency, "detector_efficiency");
    v.probability(cfg.dark_count_prob, "dark_count_prob");
    v.probability(cfg.optical_error_prob, "optical_error_prob");
    v.probability(cfg.afterpulse_prob, "afterpulse_prob");

    if (cfg.attack.active()) {
        v.probability(cfg.attack.block_fraction, "attack.block_fraction");
        v.probability(cfg.attack.split_fraction, "attack.split_fraction");
    }

    v.require(cfg.target_sifted_bits > 0, "target_sifted_bits", "must be positive");
    v.require(cfg.bound_sigmas >= 0.0 && std::isfinite(cfg.bound_sigmas), "bound_sigmas", "must be non-negative");
    v.require(cfg.f_ec_assumed >= 1.0 && std::isfinite(cfg.f_ec_assumed), "f_ec_assumed",
              "must be at least 1 (Shannon limit)");
    if (cfg.alarm_lower_tol) v.require(*cfg.alarm_lower_tol >= 0.0, "alarm_lower_tol", "must be non-negative");
    if (cfg.alarm_upper_tol) v.require(*cfg.alarm_upper_tol >= 0.0, "alarm_upper_tol", "must be non-negative");

    v.throw_if_any();
    return cfg;
}

}  // namespace decoyqkd
