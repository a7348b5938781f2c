#pragma once

// End-to-end runs: session -> sifting -> decoy bounds -> Cascade on the
// signal bits -> certificate -> privacy amplification, plus campaigns of
// independent sessions and the two sweeps (attack strength, session length).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decoyqkd/model.hpp"
#include "decoyqkd/session.hpp"

namespace decoyqkd {

struct RunOptions {
    // Campaigns spread sessions over this many threads; a single run spreads
    // its blocks instead. 0: hardware concurrency.
    unsigned workers = 0;
    SessionOptions session;
    bool keep_key = false;
    bool keep_streams = false;
};

struct PipelineResult {
    KeyReport report;
    std::vector<std::uint8_t> key;  // only with keep_key
    std::optional<SessionResult> streams;  // only with keep_streams
};

/// Runs one full session. Simulation aborts (e.g. nothing ever sifted) are
/// reported through report.aborted rather than thrown; invalid configs throw
/// ConfigError.
PipelineResult run_pipeline(const SessionConfig& cfg, const RunOptions& options = {});

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;

    double stderr_mean() const noexcept;
};

struct CampaignSummary {
    std::size_t sessions = 0;
    std::size_t aborted = 0;
    std::size_t positive_rate = 0;
    std::size_t pns_alarms = 0;
    std::size_t artifact_alarms = 0;
    // Over sessions that produced statistics.
    Moments rate_bps;
    Moments q_mu;
    Moments q_nu;
    Moments eps_mu;
    Moments eps_nu;
    Moments ratio;
    Moments seconds;
    Moments f_ec;
};

struct CampaignResult {
    std::vector<KeyReport> reports;  // by session index
    CampaignSummary summary;
};

/// Session i runs with seed derive_seed(cfg.seed, i).
CampaignResult run_campaign(const SessionConfig& cfg, std::size_t n_sessions, const RunOptions& options = {},
                            const std::function<void(std::size_t, const KeyReport&)>& on_session = {});

CampaignSummary summarize(const std::vector<KeyReport>& reports);

struct RatioSweepRow {
    double attack_fraction = 0.0;
    CampaignSummary summary;
};

/// One campaign per attack strength, attack = partial_pns(fraction).
std::vector<RatioSweepRow> sweep_ratio(const SessionConfig& cfg, const std::vector<double>& fractions,
                                       std::size_t sessions_per_point, const RunOptions& options = {});

struct DurationSweepRow {
    double seconds = 0.0;
    Count target_sifted_bits = 0;
    // "montecarlo" or "analytic".
    std::string source;
    double rate_bps = 0.0;
    double rate_stddev = 0.0;
    double fraction_of_asymptote = 0.0;
};

struct DurationSweep {
    std::vector<DurationSweepRow> rows;
    double asymptote_seconds = 0.0;
    double asymptote_rate_bps = 0.0;
    std::optional<double> min_positive_seconds;
};

/// For each duration, the sifted-bit target is the expected yield of that
/// much simulated time. Durations up to `montecarlo_limit_seconds` are
/// simulated; longer ones use the analytic model. The largest duration is the
/// asymptote the rows are normalised to.
DurationSweep sweep_duration(const SessionConfig& cfg, const std::vector<double>& durations,
                             std::size_t sessions_per_point, double montecarlo_limit_seconds,
                             const RunOptions& options = {});

}  // namespace decoyqkd
