#include "decoyqkd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <mutex>
#include <thread>

#include "decoyqkd/analytic.hpp"
#include "decoyqkd/estimator.hpp"
#include "decoyqkd/keyrate.hpp"
#include "decoyqkd/privacy.hpp"
#include "decoyqkd/protocol.hpp"
#include "decoyqkd/random.hpp"
#include "decoyqkd/reconciliation.hpp"

namespace decoyqkd {

namespace {

enum PipelineStream : std::uint64_t { kReconcile = 4, kHashSeed = 5 };

unsigned resolve_workers(unsigned w) { return w != 0 ? w : std::max(1u, std::thread::hardware_concurrency()); }

KeyReport aborted_report(const SessionConfig& cfg, const std::string& why) {
    KeyReport r;
    r.seed = cfg.seed;
    r.config = cfg;
    // Nothing can ever click: no expected ratio, reported as 0.
    if (cfg.mu * cfg.system_efficiency() + cfg.dark_count_prob > 0.0) {
        r.ratio_expected = expected_ratio(cfg.mu, cfg.nu, cfg.system_efficiency(), cfg.dark_count_prob);
    }
    r.aborted = true;
    r.abort_reason = why;
    return r;
}

Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.n = xs.size();
    if (xs.empty()) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

}  // namespace

double Moments::stderr_mean() const noexcept { return n == 0 ? 0.0 : stddev / std::sqrt(static_cast<double>(n)); }

PipelineResult run_pipeline(const SessionConfig& raw_cfg, const RunOptions& options) {
    const SessionConfig cfg = validate_config(raw_cfg);
    PipelineResult out;

    SessionOptions so = options.session;
    if (so.workers == 0) so.workers = resolve_workers(options.workers);
    SessionResult session;
    try {
        session = run_session(cfg, so);
    } catch (const SessionAborted& e) {
        out.report = aborted_report(cfg, e.what());
        return out;
    }

    const SiftResult sifted = sift(session.pulses, session.detections,
                                   std::array<Count, 2>{session.tally.signal().sent, session.tally.decoy().sent});
    const DecoyBounds bounds = compute_bounds(cfg, sifted.tally);

    const SiftedBatch& signal = sifted[IntensityClass::Signal];
    ReconciliationResult rec;
    if (signal.size() > 0) {
        const double n = static_cast<double>(signal.size());
        const double qber = std::clamp(sifted.tally.signal().error_rate(), 1.0 / n, 0.49);
        Rng rng = derive_rng(cfg.seed, {kReconcile});
        rec = cascade_reconcile(signal.alice_bits, signal.bob_bits, qber, rng);
    }

    out.report = certify(cfg, sifted.tally, session.pulses_emitted, bounds, rec);
    for (std::size_t i = 0; i < rec.corrected_bits.size(); ++i) {
        out.report.residual_errors += rec.corrected_bits[i] != signal.alice_bits[i] ? 1 : 0;
    }

    if (!out.report.aborted && options.keep_key) {
        Rng rng = derive_rng(cfg.seed, {kHashSeed});
        const auto seed = toeplitz_seed(rec.corrected_bits.size(), out.report.key_length, rng);
        out.key = privacy_amplify(rec.corrected_bits, out.report.key_length, seed);
    }
    if (options.keep_streams) out.streams = std::move(session);
    return out;
}

CampaignSummary summarize(const std::vector<KeyReport>& reports) {
    CampaignSummary s;
    s.sessions = reports.size();
    std::vector<double> rate, q_mu, q_nu, eps_mu, eps_nu, ratio, seconds, f_ec;
    for (const KeyReport& r : reports) {
        if (r.aborted) ++s.aborted;
        if (r.rate_bps > 0.0) ++s.positive_rate;
        if (r.alarm == AlarmVerdict::PnsSuspected) ++s.pns_alarms;
        if (r.alarm == AlarmVerdict::ArtifactSuspected) ++s.artifact_alarms;
        if (r.pulses_emitted == 0) continue;
        rate.push_back(r.rate_bps);
        q_mu.push_back(r.q_mu);
        q_nu.push_back(r.q_nu);
        eps_mu.push_back(r.eps_mu);
        eps_nu.push_back(r.eps_nu);
        ratio.push_back(r.ratio_measured);
        seconds.push_back(r.session_seconds);
        if (r.f_ec_achieved) f_ec.push_back(*r.f_ec_achieved);
    }
    s.rate_bps = moments(rate);
    s.q_mu = moments(q_mu);
    s.q_nu = moments(q_nu);
    s.eps_mu = moments(eps_mu);
    s.eps_nu = moments(eps_nu);
    s.ratio = moments(ratio);
    s.seconds = moments(seconds);
    s.f_ec = moments(f_ec);
    return s;
}

CampaignResult run_campaign(const SessionConfig& raw_cfg, std::size_t n_sessions, const RunOptions& options,
                            const std::function<void(std::size_t, const KeyReport&)>& on_session) {
    if (n_sessions == 0) throw std::invalid_argument("run_campaign: need at least one session");
    const SessionConfig cfg = validate_config(raw_cfg);
    CampaignResult out;
    out.reports.resize(n_sessions);

    const unsigned workers = std::min<std::size_t>(resolve_workers(options.workers), n_sessions);
    RunOptions per_session = options;
    per_session.keep_key = false;
    per_session.keep_streams = false;
    per_session.session.workers = 1;

    std::atomic<std::size_t> next{0};
    std::mutex report_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n_sessions; i = next++) {
            SessionConfig c = cfg;
            c.seed = derive_seed(cfg.seed, i);
            KeyReport r = run_pipeline(c, per_session).report;
            std::lock_guard lock(report_mutex);
            out.reports[i] = std::move(r);
            if (on_session) on_session(i, out.reports[i]);
        }
    };
    if (workers <= 1) {
        per_session.session.workers = resolve_workers(options.session.workers);
        worker();
    } else {
        std::vector<std::future<void>> pool;
        for (unsigned w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    out.summary = summarize(out.reports);
    return out;
}

std::vector<RatioSweepRow> sweep_ratio(const SessionConfig& cfg, const std::vector<double>& fractions,
                                       std::size_t sessions_per_point, const RunOptions& options) {
    std::vector<RatioSweepRow> rows;
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("sweep_ratio: attack fraction outside [0,1]");
        SessionConfig c = cfg;
        c.attack = AttackDescriptor::partial_pns(f);
        rows.push_back({f, run_campaign(c, sessions_per_point, options).summary});
    }
    return rows;
}

DurationSweep sweep_duration(const SessionConfig& raw_cfg, const std::vector<double>& durations,
                             std::size_t sessions_per_point, double montecarlo_limit_seconds,
                             const RunOptions& options) {
    if (durations.empty()) throw std::invalid_argument("sweep_duration: no durations");
    for (double d : durations) {
        if (!(d > 0.0)) throw std::invalid_argument("sweep_duration: durations must be positive");
    }
    const SessionConfig cfg = validate_config(raw_cfg);
    const double bits_per_second = 1.0 / seconds_for_sifted_bits(cfg, 1.0);

    DurationSweep out;
    for (double d : durations) {
        DurationSweepRow row;
        row.seconds = d;
        row.target_sifted_bits = std::max<Count>(1, static_cast<Count>(std::llround(d * bits_per_second)));
        if (d <= montecarlo_limit_seconds) {
            SessionConfig c = cfg;
            c.target_sifted_bits = row.target_sifted_bits;
            const CampaignSummary s = run_campaign(c, sessions_per_point, options).summary;
            row.source = "montecarlo";
            row.rate_bps = s.rate_bps.mean;
            row.rate_stddev = s.rate_bps.stddev;
        } else {
            row.source = "analytic";
            row.rate_bps = predict_rate(cfg, d).rate_bps;
        }
        out.rows.push_back(row);
    }
    const auto longest = std::max_element(out.rows.begin(), out.rows.end(),
                                          [](const auto& a, const auto& b) { return a.seconds < b.seconds; });
    out.asymptote_seconds = longest->seconds;
    out.asymptote_rate_bps = longest->rate_bps;
    for (DurationSweepRow& row : out.rows) {
        row.fraction_of_asymptote = out.asymptote_rate_bps > 0.0 ? row.rate_bps / out.asymptote_rate_bps : 0.0;
        if (row.rate_bps > 0.0 && (!out.min_positive_seconds || row.seconds < *out.min_positive_seconds)) {
            out.min_positive_seconds = row.seconds;
        }
    }
    return out;
}

}  // namespace decoyqkd
