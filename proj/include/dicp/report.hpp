#pragma once

#include "dicp/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dicp {

inline constexpr const char* kResultsHeader =
    "method,setting,epsilon,trial,coverage,avg_length,inf_frac,tpr,fdr";

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<TrialDiagnostics>& rows);

/// Mean and sample sd of each metric over the trials of one
/// (method, setting, epsilon) group. NaN entries are skipped and counted
/// in `length_trials`.
struct SummaryRow {
  std::string method;
  std::string setting;
  double epsilon = 0.0;
  Index trials = 0;
  double coverage_mean = 0.0, coverage_sd = 0.0;
  Index length_trials = 0;
  double length_mean = 0.0, length_sd = 0.0;
  double inf_frac_mean = 0.0, inf_frac_sd = 0.0;
  double tpr_mean = 0.0, tpr_sd = 0.0;
  double fdr_mean = 0.0, fdr_sd = 0.0;
};

/// Groups in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);

/// Box-plot panel for one (setting, epsilon): coverage by method with a
/// single reference line at 1 - alpha, and finite average length by method.
std::string render_panel_svg(const std::vector<ResultRow>& rows,
                             const std::string& title, double alpha);

/// File name of the panel for (setting, epsilon).
std::string panel_file_name(const std::string& setting, double epsilon);

/// Writes results.csv, summary.csv, diagnostics.csv (when present) and one
/// SVG per (setting, epsilon). Creates `outdir`; throws DataError when it
/// cannot be written.
std::vector<std::filesystem::path> emit_report(const ResultsTable& table,
                                               const std::filesystem::path& outdir);

}  // namespace dicp
