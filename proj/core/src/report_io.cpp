#include "decoyqkd/report_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "decoyqkd/config_io.hpp"

namespace decoyqkd {

namespace {

using nlohmann::json;

std::string g9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

json opt9(const std::optional<double>& x) { return x ? json(round9(*x)) : json(nullptr); }

json tally_to_json(const ClassTally& t) {
    return {{"sent", t.sent}, {"clicked", t.clicked}, {"sifted", t.sifted}, {"errors", t.errors}};
}

json moments_to_json(const Moments& m) {
    return {{"mean", round9(m.mean)}, {"stddev", round9(m.stddev)}, {"n", m.n}};
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw std::invalid_argument("unknown output format \"" + name + "\" (expected json or csv)");
}

double round9(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(g9(x).c_str(), nullptr);
}

json report_to_json(const KeyReport& r) {
    json bounds = {
        {"q_nu_lower", round9(r.bounds.q_nu_lower)},
        {"q1_lower", round9(r.bounds.q1_lower)},
        {"eps1_upper", opt9(r.bounds.eps1_upper)},
        {"sigma_used", round9(r.bounds.sigma_used)},
        {"q_nu_clamped", r.bounds.q_nu_clamped},
        {"q1_clamped", r.bounds.q1_clamped},
        {"eps1_clamped", r.bounds.eps1_clamped},
    };
    return {
        {"seed", r.seed},
        {"tally", {{"signal", tally_to_json(r.tally.signal())}, {"decoy", tally_to_json(r.tally.decoy())}}},
        {"pulses_emitted", r.pulses_emitted},
        {"detection_events", r.detection_events},
        {"q_mu", round9(r.q_mu)},
        {"q_nu", round9(r.q_nu)},
        {"eps_mu", round9(r.eps_mu)},
        {"eps_nu", round9(r.eps_nu)},
        {"bounds", bounds},
        {"n_mu_sift", r.n_mu_sift},
        {"n_1_sift_lower", r.n_1_sift_lower},
        {"leaked_bits", r.leaked_bits},
        {"verification_bits", r.verification_bits},
        {"f_ec_achieved", opt9(r.f_ec_achieved)},
        {"reconciliation_verified", r.reconciliation_verified},
        {"residual_errors", r.residual_errors},
        {"secure_length", r.secure_length},
        {"session_seconds", round9(r.session_seconds)},
        {"rate_bps", round9(r.rate_bps)},
        {"key_length", r.key_length},
        {"ratio_measured", round9(r.ratio_measured)},
        {"ratio_expected", round9(r.ratio_expected)},
        {"alarm", to_string(r.alarm)},
        {"aborted", r.aborted},
        {"abort_reason", r.aborted ? json(r.abort_reason) : json(nullptr)},
        {"config", config_to_json(r.config)},
    };
}

json summary_to_json(const CampaignSummary& s) {
    return {
        {"sessions", s.sessions},
        {"aborted", s.aborted},
        {"positive_rate", s.positive_rate},
        {"pns_alarms", s.pns_alarms},
        {"artifact_alarms", s.artifact_alarms},
        {"rate_bps", moments_to_json(s.rate_bps)},
        {"q_mu", moments_to_json(s.q_mu)},
        {"q_nu", moments_to_json(s.q_nu)},
        {"eps_mu", moments_to_json(s.eps_mu)},
        {"eps_nu", moments_to_json(s.eps_nu)},
        {"ratio", moments_to_json(s.ratio)},
        {"seconds", moments_to_json(s.seconds)},
        {"f_ec", moments_to_json(s.f_ec)},
    };
}

json prediction_to_json(const AnalyticPrediction& p) {
    return {
        {"q_mu", round9(p.q_mu)},
        {"q_nu", round9(p.q_nu)},
        {"eps_mu", round9(p.eps_mu)},
        {"eps_nu", round9(p.eps_nu)},
        {"ratio", round9(p.ratio)},
        {"ratio_expected", round9(p.ratio_expected)},
        {"session_seconds", round9(p.session_seconds)},
        {"detection_events", round9(p.detection_events)},
        {"q_nu_lower", round9(p.session.q_nu_lower)},
        {"q1_lower", round9(p.session.q1_lower)},
        {"eps1_upper", opt9(p.session.eps1_upper)},
        {"secure_length", round9(p.session.secure_length)},
        {"rate_bps", round9(p.session.rate_bps)},
        {"asymptotic_rate_bps", round9(p.asymptotic_rate_bps)},
    };
}

const std::string& csv_header() {
    static const std::string h =
        "session_index,seconds,q_mu,q_nu,eps_mu,eps_nu,ratio,q1_lower,eps1_upper,secure_length,rate_bps,alarm";
    return h;
}

std::string csv_row(std::size_t session_index, const KeyReport& r) {
    std::string row = std::to_string(session_index);
    for (double v : {r.session_seconds, r.q_mu, r.q_nu, r.eps_mu, r.eps_nu, r.ratio_measured, r.bounds.q1_lower}) {
        row += "," + g9(v);
    }
    row += "," + (r.bounds.eps1_upper ? g9(*r.bounds.eps1_upper) : std::string());
    row += "," + std::to_string(r.secure_length);
    row += "," + g9(r.rate_bps);
    row += ",";
    row += to_string(r.alarm);
    return row;
}

void write_reports(std::ostream& out, const std::vector<KeyReport>& reports, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        out << csv_header() << '\n';
        for (std::size_t i = 0; i < reports.size(); ++i) out << csv_row(i, reports[i]) << '\n';
        return;
    }
    json arr = json::array();
    for (const KeyReport& r : reports) arr.push_back(report_to_json(r));
    out << arr.dump(2) << '\n';
}

void with_output(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body, bool binary) {
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": " + std::strerror(errno));
    body(out);
    out.flush();
    if (!out) throw std::runtime_error(path.string() + ": write failed: " + std::strerror(errno));
}

void emit_report(const std::vector<KeyReport>& reports, ReportFormat format, const std::filesystem::path& path) {
    with_output(path, [&](std::ostream& out) { write_reports(out, reports, format); });
}

void write_ratio_sweep(std::ostream& out, const std::vector<RatioSweepRow>& rows, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        out << "attack_fraction,sessions,ratio_mean,ratio_stderr,rate_bps_mean,rate_bps_stderr,pns_alarms,aborted\n";
        for (const RatioSweepRow& r : rows) {
            out << g9(r.attack_fraction) << ',' << r.summary.sessions << ',' << g9(r.summary.ratio.mean) << ','
                << g9(r.summary.ratio.stderr_mean()) << ',' << g9(r.summary.rate_bps.mean) << ','
                << g9(r.summary.rate_bps.stderr_mean()) << ',' << r.summary.pns_alarms << ',' << r.summary.aborted
                << '\n';
        }
        return;
    }
    json arr = json::array();
    for (const RatioSweepRow& r : rows) {
        arr.push_back({{"attack_fraction", round9(r.attack_fraction)}, {"summary", summary_to_json(r.summary)}});
    }
    out << arr.dump(2) << '\n';
}

void write_duration_sweep(std::ostream& out, const DurationSweep& sweep, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        out << "seconds,target_sifted_bits,source,rate_bps,rate_bps_stddev,fraction_of_asymptote\n";
        for (const DurationSweepRow& r : sweep.rows) {
            out << g9(r.seconds) << ',' << r.target_sifted_bits << ',' << r.source << ',' << g9(r.rate_bps) << ','
                << g9(r.rate_stddev) << ',' << g9(r.fraction_of_asymptote) << '\n';
        }
        return;
    }
    json rows = json::array();
    for (const DurationSweepRow& r : sweep.rows) {
        rows.push_back({{"seconds", round9(r.seconds)},
                        {"target_sifted_bits", r.target_sifted_bits},
                        {"source", r.source},
                        {"rate_bps", round9(r.rate_bps)},
                        {"rate_bps_stddev", round9(r.rate_stddev)},
                        {"fraction_of_asymptote", round9(r.fraction_of_asymptote)}});
    }
    out << json{{"rows", rows},
                {"asymptote_seconds", round9(sweep.asymptote_seconds)},
                {"asymptote_rate_bps", round9(sweep.asymptote_rate_bps)},
                {"min_positive_seconds", opt9(sweep.min_positive_seconds)}}
                   .dump(2)
        << '\n';
}

}  // namespace decoyqkd
