#pragma once

// Report serialization: KeyReport as JSON (docs/report-schema.md), the
// per-session CSV table, campaign summaries and sweep tables. Measured
// numbers carry 9 significant digits; the config echo is exact.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decoyqkd/analytic.hpp"
#include "decoyqkd/pipeline.hpp"

namespace decoyqkd {

enum class ReportFormat { Json, Csv };

/// "json" or "csv"; throws std::invalid_argument otherwise.
ReportFormat parse_report_format(const std::string& name);

/// Rounds to 9 significant digits (the printed form of %.9g).
double round9(double x);

nlohmann::json report_to_json(const KeyReport& r);
nlohmann::json summary_to_json(const CampaignSummary& s);
nlohmann::json prediction_to_json(const AnalyticPrediction& p);

/// session_index,seconds,q_mu,q_nu,eps_mu,eps_nu,ratio,q1_lower,eps1_upper,secure_length,rate_bps,alarm
const std::string& csv_header();
std::string csv_row(std::size_t session_index, const KeyReport& r);

void write_reports(std::ostream& out, const std::vector<KeyReport>& reports, ReportFormat format);

/// Writes to `path`, or to stdout when path is "-". Filesystem errors are
/// thrown as std::runtime_error carrying the system message.
void emit_report(const std::vector<KeyReport>& reports, ReportFormat format, const std::filesystem::path& path);

void write_ratio_sweep(std::ostream& out, const std::vector<RatioSweepRow>& rows, ReportFormat format);
void write_duration_sweep(std::ostream& out, const DurationSweep& sweep, ReportFormat format);

/// Opens `path` for writing ("-" is stdout) and hands the stream to `body`.
void with_output(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body,
                 bool binary = false);

}  // namespace decoyqkd
