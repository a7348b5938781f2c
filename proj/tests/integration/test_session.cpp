#include <doctest.h>

#include <cmath>
#include <sstream>

#include "decoyqkd/analytic.hpp"
#include "decoyqkd/estimator.hpp"
#include "decoyqkd/pipeline.hpp"
#include "decoyqkd/protocol.hpp"
#include "decoyqkd/report_io.hpp"
#include "decoyqkd/session.hpp"

using namespace decoyqkd;

namespace {

SessionConfig small(Count bits, std::uint64_t seed = 7) {
    SessionConfig cfg;
    cfg.target_sifted_bits = bits;
    cfg.seed = seed;
    return validate_config(cfg);
}

SessionOptions quick(unsigned workers) {
    SessionOptions o;
    o.workers = workers;
    o.block_size = 1 << 16;
    return o;
}

}  // namespace

TEST_CASE("dense records reproduce the tally") {
    SessionOptions opts = quick(1);
    opts.record_all_pulses = true;
    const SessionConfig cfg = small(3000);
    const SessionResult s = run_session(cfg, opts);

    REQUIRE(s.pulses.size() == s.pulses_emitted);
    REQUIRE(s.detections.size() == s.pulses_emitted);
    SessionTally t;
    for (std::size_t i = 0; i < s.pulses.size(); ++i) {
        const PulseRecord& p = s.pulses[i];
        const DetectionRecord& d = s.detections[i];
        REQUIRE(p.index == i);
        REQUIRE(d.index == i);
        ClassTally& c = t[p.cls];
        ++c.sent;
        if (!d.clicked) continue;
        ++c.clicked;
        if (is_sifted(p, d)) {
            ++c.sifted;
            if (is_sift_error(p, d)) ++c.errors;
        }
    }
    CHECK(t == s.tally);
    CHECK(s.tally.sifted() == cfg.target_sifted_bits);
    CHECK(s.tally.signal().consistent());
    CHECK(s.tally.decoy().consistent());
    CHECK(s.elapsed_seconds == doctest::Approx(s.pulses_emitted / cfg.clock_rate_hz));
}

TEST_CASE("session and pipeline are identical for any worker count") {
    const SessionConfig cfg = small(40'000, 11);
    const SessionResult a = run_session(cfg, quick(1));
    const SessionResult b = run_session(cfg, quick(3));
    CHECK(a.tally == b.tally);
    CHECK(a.pulses_emitted == b.pulses_emitted);
    REQUIRE(a.pulses.size() == b.pulses.size());
    bool same = true;
    for (std::size_t i = 0; i < a.pulses.size(); ++i) {
        same = same && a.pulses[i].index == b.pulses[i].index && a.pulses[i].alice_bit == b.pulses[i].alice_bit &&
               a.detections[i].bob_bit == b.detections[i].bob_bit && a.detections[i].cause == b.detections[i].cause;
    }
    CHECK(same);

    RunOptions r1{1, quick(1), true, false};
    RunOptions r3{3, quick(3), true, false};
    const PipelineResult p1 = run_pipeline(cfg, r1);
    const PipelineResult p3 = run_pipeline(cfg, r3);
    CHECK(report_to_json(p1.report).dump() == report_to_json(p3.report).dump());
    CHECK(p1.key == p3.key);
}

TEST_CASE("campaign CSV is byte-identical across runs and worker counts") {
    const SessionConfig cfg = small(20'000, 5);
    RunOptions one{1, quick(1), false, false};
    RunOptions three{3, quick(1), false, false};
    auto csv = [&](const RunOptions& o) {
        std::vector<std::size_t> order;
        const CampaignResult c = run_campaign(cfg, 5, o, [&](std::size_t i, const KeyReport&) { order.push_back(i); });
        CHECK(order.size() == 5);
        std::ostringstream out;
        write_reports(out, c.reports, ReportFormat::Csv);
        return out.str();
    };
    const std::string a = csv(one);
    CHECK(a == csv(one));
    CHECK(a == csv(three));

    SessionConfig other = cfg;
    other.seed = 6;
    std::ostringstream out;
    write_reports(out, run_campaign(other, 5, one).reports, ReportFormat::Csv);
    CHECK(out.str() != a);
}

TEST_CASE("pipeline on a short default session") {
    const SessionConfig cfg = small(200'000, 3);
    RunOptions opts{1, quick(1), true, true};
    const PipelineResult r = run_pipeline(cfg, opts);
    const KeyReport& k = r.report;
    CHECK(k.tally.sifted() == 200'000);
    CHECK(k.q_mu == doctest::Approx(k.tally.signal().gain()));
    CHECK(k.eps_mu == doctest::Approx(k.tally.signal().error_rate()));
    CHECK(k.ratio_measured == doctest::Approx(k.q_nu / k.q_mu));
    CHECK(k.detection_events == k.tally.clicked());
    CHECK(k.n_mu_sift == k.tally.signal().sifted);
    CHECK(k.reconciliation_verified);
    CHECK(k.residual_errors == 0);
    REQUIRE(k.f_ec_achieved.has_value());
    CHECK(*k.f_ec_achieved > 1.0);
    CHECK(*k.f_ec_achieved < 1.3);
    CHECK(k.key_length <= k.secure_length);
    CHECK_FALSE(k.aborted);
    CHECK(r.key.size() == k.key_length);
    REQUIRE(r.streams.has_value());
    CHECK(r.streams->tally == k.tally);
}

TEST_CASE("no transmission: sessions abort instead of certifying") {
    SessionConfig cfg;
    cfg.channel_transmittance = 0.0;
    cfg.target_sifted_bits = 400;
    RunOptions opts{1, quick(1), false, false};
    const KeyReport r = run_pipeline(validate_config(cfg), opts).report;
    CHECK(r.aborted);
    CHECK(r.key_length == 0);
    CHECK(r.secure_length == 0);
    CHECK(r.eps_mu > 0.35);

    SessionConfig silent = cfg;
    silent.dark_count_prob = 0.0;
    opts.session.zero_sift_budget = 2'000'000;
    const KeyReport s = run_pipeline(validate_config(silent), opts).report;
    CHECK(s.aborted);
    CHECK_FALSE(s.abort_reason.empty());
}

TEST_CASE("afterpulsing raises the decoy/signal ratio") {
    SessionConfig cfg = small(150'000, 9);
    cfg.afterpulse_prob = 0.08;
    RunOptions opts{1, quick(1), false, false};
    const KeyReport r = run_pipeline(cfg, opts).report;
    CHECK(r.ratio_measured > r.ratio_expected);
    CHECK(r.alarm == AlarmVerdict::ArtifactSuspected);
    CHECK(r.aborted);
}

TEST_CASE("rate-matched PNS attack keeps Q_mu, lowers the ratio and trips the alarm") {
    SessionConfig cfg = small(300'000, 13);
    const auto block = solve_rate_matching_block_fraction(cfg);
    REQUIRE(block.has_value());
    const double q_mu_clean = predict_analytic(cfg).q_mu;
    cfg.attack = AttackDescriptor::pns(*block);
    RunOptions opts{1, quick(1), false, false};
    const KeyReport r = run_pipeline(cfg, opts).report;
    CHECK(std::abs(r.q_mu - q_mu_clean) < 5 * std::sqrt(q_mu_clean / r.tally.signal().sent));
    CHECK(r.ratio_measured < 0.9 * r.ratio_expected);
    CHECK(r.alarm == AlarmVerdict::PnsSuspected);
    CHECK(r.aborted);
    CHECK(r.key_length == 0);
}

TEST_CASE("partial attacks either raise the alarm or lower the certified rate") {
    RunOptions opts{1, quick(1), false, false};
    const SessionConfig clean = small(150'000, 21);
    const double clean_rate = run_pipeline(clean, opts).report.rate_bps;
    for (double a : {0.1, 0.2, 0.3, 0.5, 0.8}) {
        SessionConfig cfg = clean;
        cfg.attack = AttackDescriptor::partial_pns(a);
        const KeyReport r = run_pipeline(cfg, opts).report;
        CAPTURE(a);
        CHECK((r.alarm == AlarmVerdict::PnsSuspected || r.rate_bps <= clean_rate));
    }
}

TEST_CASE("single-photon bound is sound and within 25% without dark counts") {
    SessionConfig cfg;
    cfg.dark_count_prob = 0.0;
    cfg.seed = 31;
    cfg = validate_config(cfg);
    RunOptions opts{0, quick(0), false, true};
    const PipelineResult r = run_pipeline(cfg, opts);
    REQUIRE(r.streams.has_value());
    Count single_clicks = 0;
    for (std::size_t i = 0; i < r.streams->pulses.size(); ++i) {
        const PulseRecord& p = r.streams->pulses[i];
        if (p.cls == IntensityClass::Signal && p.photon_count == 1 && r.streams->detections[i].clicked) ++single_clicks;
    }
    const double q1_true = static_cast<double>(single_clicks) / r.report.tally.signal().sent;
    const double q1_expected = cfg.mu * std::exp(-cfg.mu) * cfg.system_efficiency();
    CHECK(q1_true == doctest::Approx(q1_expected).epsilon(0.02));
    CHECK(r.report.bounds.q1_lower <= q1_true);
    CHECK(r.report.bounds.q1_lower >= 0.75 * q1_true);
}

TEST_CASE("campaign means agree with the closed-form model") {
    SessionConfig cfg = small(100'000, 41);
    RunOptions opts{1, quick(1), false, false};
    const CampaignResult c = run_campaign(cfg, 12, opts);
    const CampaignSummary& s = c.summary;
    REQUIRE(s.sessions == 12);
    REQUIRE(s.q_mu.n == 12);

    // The certificate is compared at the efficiency Cascade actually reached.
    SessionConfig at_measured = cfg;
    at_measured.f_ec_assumed = s.f_ec.mean;
    const AnalyticPrediction p = predict_analytic(at_measured);

    auto agree = [](const char* name, const Moments& m, double expected) {
        CAPTURE(name);
        CAPTURE(m.mean);
        CAPTURE(expected);
        CHECK(std::abs(m.mean - expected) <= 5 * m.stderr_mean());
    };
    agree("q_mu", s.q_mu, p.q_mu);
    agree("q_nu", s.q_nu, p.q_nu);
    agree("eps_mu", s.eps_mu, p.eps_mu);
    agree("eps_nu", s.eps_nu, p.eps_nu);
    agree("ratio", s.ratio, p.ratio);
    agree("seconds", s.seconds, p.session_seconds);
    agree("rate_bps", s.rate_bps, p.session.rate_bps);
}
