// Report rendering (CSV, JSON, markdown) and small file I/O helpers. All
// renderers are deterministic: identical inputs produce byte-identical
// output, so reports can be diffed across runs.

#pragma once

#include <string>

#include "fairrank/agreement.hpp"
#include "fairrank/fairness.hpp"
#include "fairrank/utility.hpp"

namespace fairrank {

enum class ReportFormat { Csv, Json, Markdown };

std::optional<ReportFormat> report_format_from_token(const std::string& token);

std::string render_fairness(const FairnessReport& report, ReportFormat format);
std::string render_utility(const UtilityReport& report, ReportFormat format);
std::string render_agreement(const AgreementReport& report, ReportFormat format);

/// Joined fairness + utility rows (Table-6 and Table-7 columns side by side),
/// matched on query_id.
std::string render_combined(const FairnessReport& fairness, const UtilityReport& utility,
                            ReportFormat format);

/// Fixed 6-decimal rendering used for metric cells.
std::string format_metric(double value);

/// Shortest representation that parses back to the same double.
std::string format_double_roundtrip(double value);

std::string csv_escape(const std::string& s);

std::string read_file(const std::string& path);

/// Writes via a temp file in the same directory plus rename, so an
/// interrupted run never leaves a half-written report in place.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace fairrank
