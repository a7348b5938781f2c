#pragma once

// Shared domain types for the decoy-state BB84 simulator: session
// configuration, per-pulse records, per-class tallies, security bounds and the
// final key report.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace decoyqkd {

using Count = std::uint64_t;

/// Raised by validate_config; `fields()` names every offending field.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(const std::string& message, std::vector<std::string> fields)
        : std::invalid_argument(message), fields_(std::move(fields)) {}

    const std::vector<std::string>& fields() const noexcept { return fields_; }

  private:
    std::vector<std::string> fields_;
};

enum class IntensityClass : std::uint8_t { Signal = 0, Decoy = 1 };

constexpr std::size_t class_index(IntensityClass c) noexcept { return static_cast<std::size_t>(c); }
const char* to_string(IntensityClass c) noexcept;

enum class AttackKind : std::uint8_t { None, PNS };

/// Photon-number-splitting eavesdropper.
///
/// Single-photon pulses are blocked with probability `block_fraction`; an
/// unblocked single photon travels the ordinary lossy fibre. Multi-photon
/// pulses are split with probability `split_fraction`: Eve keeps one photon and
/// forwards the rest over a lossless line. `bypass_bob_loss` additionally lets
/// forwarded photons skip Bob's internal loss.
struct AttackDescriptor {
    AttackKind kind = AttackKind::None;
    double block_fraction = 0.0;
    double split_fraction = 1.0;
    bool bypass_bob_loss = false;

    static AttackDescriptor none() { return {}; }
    static AttackDescriptor pns(double block_fraction, double split_fraction = 1.0) {
        return {AttackKind::PNS, block_fraction, split_fraction, false};
    }
    /// Eve runs the full attack on a random fraction of the pulses and leaves
    /// the rest alone; fraction 0 is indistinguishable from no attack.
    static AttackDescriptor partial_pns(double fraction) {
        if (fraction == 0.0) return none();
        return {AttackKind::PNS, fraction, fraction, false};
    }

    bool active() const noexcept { return kind == AttackKind::PNS; }
};

/// All physical and protocol parameters of one run. Defaults describe a
/// 25.3 km fibre link clocked at 7.143 MHz.
struct SessionConfig {
    double mu = 0.425;
    double nu = 0.204;
    double decoy_probability = 0.25;
    double clock_rate_hz = 7.143e6;

    double channel_transmittance = 0.33884415613920255;  // 4.7 dB
    double bob_transmittance = 0.5623413251903491;      // 2.5 dB
    // Chosen so that channel * bob * detector = 1.95e-2.
    double detector_efficiency = 0.10233745474870566;

    // Loss in dB; when set, validate_config converts to the transmittance
    // field and clears these.
    std::optional<double> channel_loss_db;
    std::optional<double> bob_loss_db;

    double dark_count_prob = 9.4e-5;
    double optical_error_prob = 0.01172;
    double afterpulse_prob = 0.0;

    AttackDescriptor attack;

    Count target_sifted_bits = 1'000'000;
    double bound_sigmas = 10.0;
    double f_ec_assumed = 1.10;

    // Relative tolerances of the ratio alarm; unset means the session's own
    // bound_sigmas statistical band.
    std::optional<double> alarm_lower_tol;
    std::optional<double> alarm_upper_tol;

    std::uint64_t seed = 20070215;

    double system_efficiency() const noexcept {
        return channel_transmittance * bob_transmittance * detector_efficiency;
    }
    /// Per-photon detection probability once a photon has left the fibre.
    double receiver_efficiency() const noexcept { return bob_transmittance * detector_efficiency; }
};

/// Returns the canonical (linear transmittance) form of `cfg` or throws
/// ConfigError listing every violated constraint.
SessionConfig validate_config(SessionConfig cfg);

double db_to_transmittance(double loss_db) noexcept;

/// -x log2 x - (1-x) log2(1-x), with H2(0) = H2(1) = 0.
double binary_entropy(double x);

struct PulseRecord {
    Count index = 0;
    IntensityClass cls = IntensityClass::Signal;
    std::uint16_t photon_count = 0;
    std::uint8_t alice_basis = 0;
    std::uint8_t alice_bit = 0;
};

enum class DetectionCause : std::uint8_t { Photon = 0, Dark = 1, Afterpulse = 2 };
const char* to_string(DetectionCause c) noexcept;

struct DetectionRecord {
    Count index = 0;
    bool clicked = false;
    std::uint8_t bob_basis = 0;
    std::uint8_t bob_bit = 0;  // meaningful only when clicked
    DetectionCause cause = DetectionCause::Photon;
};

/// Counters of one intensity class.
struct ClassTally {
    Count sent = 0;
    Count clicked = 0;
    Count sifted = 0;
    Count errors = 0;

    /// Transmittance Q: clicks per sent pulse.
    double gain() const noexcept { return sent == 0 ? 0.0 : static_cast<double>(clicked) / static_cast<double>(sent); }
    /// QBER: errors per sifted bit.
    double error_rate() const noexcept {
        return sifted == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(sifted);
    }
    bool consistent() const noexcept { return errors <= sifted && sifted <= clicked && clicked <= sent; }

    ClassTally& operator+=(const ClassTally& o) noexcept {
        sent += o.sent;
        clicked += o.clicked;
        sifted += o.sifted;
        errors += o.errors;
        return *this;
    }
    friend ClassTally operator+(ClassTally a, const ClassTally& b) noexcept { return a += b; }
    friend bool operator==(const ClassTally&, const ClassTally&) = default;
};

/// Signal and decoy tallies side by side.
struct SessionTally {
    std::array<ClassTally, 2> by_class{};

    ClassTally& operator[](IntensityClass c) noexcept { return by_class[class_index(c)]; }
    const ClassTally& operator[](IntensityClass c) const noexcept { return by_class[class_index(c)]; }
    const ClassTally& signal() const noexcept { return by_class[0]; }
    const ClassTally& decoy() const noexcept { return by_class[1]; }

    Count sent() const noexcept { return by_class[0].sent + by_class[1].sent; }
    Count clicked() const noexcept { return by_class[0].clicked + by_class[1].clicked; }
    Count sifted() const noexcept { return by_class[0].sifted + by_class[1].sifted; }

    SessionTally& operator+=(const SessionTally& o) noexcept {
        by_class[0] += o.by_class[0];
        by_class[1] += o.by_class[1];
        return *this;
    }
    friend SessionTally operator+(SessionTally a, const SessionTally& b) noexcept { return a += b; }
    friend bool operator==(const SessionTally&, const SessionTally&) = default;
};

/// Decoy-state bounds derived from one session's tallies.
struct DecoyBounds {
    double q_nu_lower = 0.0;
    double q1_lower = 0.0;
    // Unset when q1_lower is zero: no single-photon error bound exists.
    std::optional<double> eps1_upper;
    double sigma_used = 0.0;

    bool q_nu_clamped = false;
    bool q1_clamped = false;
    bool eps1_clamped = false;

    bool usable() const noexcept { return q1_lower > 0.0 && eps1_upper.has_value(); }
};

enum class AlarmVerdict : std::uint8_t { Ok, PnsSuspected, ArtifactSuspected };
const char* to_string(AlarmVerdict v) noexcept;

struct KeyReport {
    std::uint64_t seed = 0;

    // Measured statistics.
    SessionTally tally;
    Count pulses_emitted = 0;
    Count detection_events = 0;
    double q_mu = 0.0;
    double q_nu = 0.0;
    double eps_mu = 0.0;
    double eps_nu = 0.0;

    DecoyBounds bounds;

    // Key-length bookkeeping.
    Count n_mu_sift = 0;
    Count n_1_sift_lower = 0;
    Count leaked_bits = 0;
    Count verification_bits = 0;
    std::optional<double> f_ec_achieved;
    bool reconciliation_verified = false;
    Count residual_errors = 0;  // ground truth, from the simulation
    Count secure_length = 0;
    double session_seconds = 0.0;
    double rate_bps = 0.0;

    // Bits actually distilled; zero when the session is aborted.
    Count key_length = 0;

    double ratio_measured = 0.0;
    double ratio_expected = 0.0;
    AlarmVerdict alarm = AlarmVerdict::Ok;

    bool aborted = false;
    std::string abort_reason;

    SessionConfig config;
};

}  // namespace decoyqkd
