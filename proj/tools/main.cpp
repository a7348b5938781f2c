// decoyqkd: command-line front end.
//
//   decoyqkd run            one session through the full pipeline
//   decoyqkd campaign       N independent sessions, per-session table
//   decoyqkd sweep-ratio    certified rate against PNS attack strength
//   decoyqkd sweep-duration certified rate against session length
//   decoyqkd predict        closed-form expectation, no simulation
//
// Exit codes: 0 success, 1 runtime/filesystem error, 2 invalid configuration
// or arguments, 3 every session aborted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decoyqkd/analytic.hpp"
#include "decoyqkd/config_io.hpp"
#include "decoyqkd/pipeline.hpp"
#include "decoyqkd/raw_stream.hpp"
#include "decoyqkd/report_io.hpp"

namespace {

using namespace decoyqkd;

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitAllAborted = 3;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "-";
    std::string format = "json";
    double scale = 1.0;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON session config (built-in defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Root RNG seed, overrides the config");
    cmd->add_option("--out", c.out, "Output file, - for stdout")->capture_default_str();
    cmd->add_option("--format", c.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--scale", c.scale, "Divide the sifted-bit target by this factor")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--workers", c.workers, "Worker threads, 0 = all cores")->capture_default_str();
}

SessionConfig resolve_config(const Common& c) {
    SessionConfig cfg = c.config_path.empty() ? validate_config(SessionConfig{}) : load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (c.scale != 1.0) {
        const double scaled = static_cast<double>(cfg.target_sifted_bits) / c.scale;
        cfg.target_sifted_bits = std::max<Count>(1, static_cast<Count>(scaled));
    }
    return validate_config(cfg);
}

RunOptions run_options(const Common& c) {
    RunOptions o;
    o.workers = c.workers;
    o.session.workers = c.workers;
    return o;
}

void print_summary(std::ostream& err, const CampaignSummary& s) {
    char line[256];
    std::snprintf(line, sizeof line, "sessions %zu  aborted %zu  positive %zu  pns_alarms %zu  artifact_alarms %zu\n",
                  s.sessions, s.aborted, s.positive_rate, s.pns_alarms, s.artifact_alarms);
    err << line;
    auto row = [&](const char* name, const Moments& m) {
        std::snprintf(line, sizeof line, "  %-8s mean %.6g  sd %.3g\n", name, m.mean, m.stddev);
        err << line;
    };
    row("rate_bps", s.rate_bps);
    row("q_mu", s.q_mu);
    row("q_nu", s.q_nu);
    row("eps_mu", s.eps_mu);
    row("eps_nu", s.eps_nu);
    row("ratio", s.ratio);
    row("seconds", s.seconds);
    row("f_ec", s.f_ec);
}

int cmd_run(const Common& c, const std::string& raw_out, const std::string& key_out) {
    const SessionConfig cfg = resolve_config(c);
    RunOptions o = run_options(c);
    o.keep_key = !key_out.empty();
    o.keep_streams = !raw_out.empty();
    PipelineResult r = run_pipeline(cfg, o);

    emit_report({r.report}, parse_report_format(c.format), c.out);
    if (!raw_out.empty() && r.streams) {
        with_output(raw_out, [&](std::ostream& os) { write_raw_stream(os, r.streams->pulses, r.streams->detections); },
                    true);
    }
    if (!key_out.empty()) {
        // Key bits packed MSB-first, final byte zero-padded.
        with_output(key_out, [&](std::ostream& os) {
            for (std::size_t i = 0; i < r.key.size(); i += 8) {
                unsigned char byte = 0;
                for (std::size_t b = 0; b < 8 && i + b < r.key.size(); ++b) byte |= (r.key[i + b] & 1u) << (7 - b);
                os.put(static_cast<char>(byte));
            }
        }, true);
    }
    if (r.report.aborted) std::cerr << "session aborted: " << r.report.abort_reason << '\n';
    return r.report.aborted ? kExitAllAborted : 0;
}

int cmd_campaign(const Common& c, std::size_t sessions, const std::string& summary_out) {
    const SessionConfig cfg = resolve_config(c);
    const CampaignResult result = run_campaign(cfg, sessions, run_options(c));
    emit_report(result.reports, parse_report_format(c.format), c.out);
    print_summary(std::cerr, result.summary);
    if (!summary_out.empty()) {
        with_output(summary_out, [&](std::ostream& os) { os << summary_to_json(result.summary).dump(2) << '\n'; });
    }
    return result.summary.aborted == result.summary.sessions ? kExitAllAborted : 0;
}

int cmd_sweep_ratio(const Common& c, const std::vector<double>& fractions, std::size_t sessions) {
    const SessionConfig cfg = resolve_config(c);
    const auto rows = sweep_ratio(cfg, fractions, sessions, run_options(c));
    with_output(c.out, [&](std::ostream& os) { write_ratio_sweep(os, rows, parse_report_format(c.format)); });
    return 0;
}

int cmd_sweep_duration(const Common& c, const std::vector<double>& durations, std::size_t sessions,
                       double mc_limit) {
    const SessionConfig cfg = resolve_config(c);
    const DurationSweep sweep = sweep_duration(cfg, durations, sessions, mc_limit, run_options(c));
    with_output(c.out, [&](std::ostream& os) { write_duration_sweep(os, sweep, parse_report_format(c.format)); });
    if (sweep.min_positive_seconds) {
        std::cerr << "shortest duration with positive rate: " << *sweep.min_positive_seconds << " s\n";
    } else {
        std::cerr << "no duration gave a positive rate\n";
    }
    return 0;
}

int cmd_predict(const Common& c) {
    const SessionConfig cfg = resolve_config(c);
    nlohmann::json j = prediction_to_json(predict_analytic(cfg));
    const auto block = solve_rate_matching_block_fraction(cfg);
    j["rate_matching_block_fraction"] = block ? nlohmann::json(round9(*block)) : nlohmann::json(nullptr);
    with_output(c.out, [&](std::ostream& os) {
        if (c.format == "csv") {
            os << "quantity,value\n";
            for (const auto& [k, v] : j.items()) os << k << ',' << (v.is_null() ? "" : v.dump()) << '\n';
        } else {
            os << j.dump(2) << '\n';
        }
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoy-state BB84 simulator and key-rate certifier"};
    app.require_subcommand(1);

    Common common;
    std::string raw_out;
    std::string key_out;
    std::size_t sessions = 10;
    std::string summary_out;
    std::vector<double> fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    std::vector<double> durations{0.1, 0.2, 0.4, 0.6, 1.0, 2.0, 4.6, 9.2, 18.4, 38.7, 100.0, 1000.0};
    double mc_limit = 40.0;

    auto* run = app.add_subcommand("run", "Simulate and certify one session");
    add_common(run, common);
    run->add_option("--raw-out", raw_out, "Write the pulse/detection stream (binary)");
    run->add_option("--key-out", key_out, "Write the distilled key (binary, MSB first)");

    auto* campaign = app.add_subcommand("campaign", "Run independent sessions");
    add_common(campaign, common);
    campaign->add_option("--sessions", sessions, "Number of sessions")->check(CLI::PositiveNumber)->capture_default_str();
    campaign->add_option("--summary-out", summary_out, "Write the campaign summary as JSON");

    auto* sratio = app.add_subcommand("sweep-ratio", "Rate against partial PNS attack strength");
    add_common(sratio, common);
    sratio->add_option("--fractions", fractions, "Attack fractions in [0,1]")->delimiter(',');
    sratio->add_option("--sessions", sessions, "Sessions per point")->check(CLI::PositiveNumber);

    auto* sdur = app.add_subcommand("sweep-duration", "Rate against session length");
    add_common(sdur, common);
    sdur->add_option("--durations", durations, "Session lengths in seconds")->delimiter(',');
    sdur->add_option("--sessions", sessions, "Sessions per simulated point")->check(CLI::PositiveNumber);
    sdur->add_option("--mc-limit", mc_limit, "Simulate durations up to this many seconds, analytic beyond")
        ->capture_default_str();

    auto* predict = app.add_subcommand("predict", "Closed-form expectation for a config");
    add_common(predict, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*run) return cmd_run(common, raw_out, key_out);
        if (*campaign) return cmd_campaign(common, sessions, summary_out);
        if (*sratio) return cmd_sweep_ratio(common, fractions, sessions);
        if (*sdur) return cmd_sweep_duration(common, durations, sessions, mc_limit);
        if (*predict) return cmd_predict(common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
