#pragma once

#include "dicp/config.hpp"
#include "dicp/conformal.hpp"
#include "dicp/csv.hpp"

#include <string>
#include <vector>

namespace dicp {

/// One (method, setting, epsilon, trial) row of results.csv.
struct ResultRow {
  std::string method;
  std::string setting;  // "A", "B", "C" or "data"
  double epsilon = 0.0;
  Index trial = 0;
  double coverage = 0.0;
  double avg_length = 0.0;  // NaN when every interval was infinite
  double inf_frac = 0.0;
  double tpr = 0.0;  // pooled over the trial's test cells; NaN without truth
  double fdr = 0.0;
};

/// Per-trial detector diagnostics (simulation or injection only).
struct TrialDiagnostics {
  std::string setting;
  double epsilon = 0.0;
  Index trial = 0;
  /// Fraction of test points with O* contained in D(x~).
  double sure_detection = 0.0;
  /// Mean Jaccard similarity of D(x~) \ O* and D(x) \ O*.
  double jaccard_mean = 0.0;
  /// Test points where both false-discovery sets are empty.
  Index empty_both = 0;
  /// Test points whose whole feature vector was flagged.
  Index full_masks = 0;
};

struct ResultsTable {
  double alpha = 0.1;
  std::vector<ResultRow> rows;
  std::vector<TrialDiagnostics> diagnostics;
};

/// External dataset after log transforms and variance screening.
struct PreparedDataset {
  LabeledDataset data;
  std::vector<Index> kept_columns;  // 0-based columns of the source CSV
};

/// Applies `log_columns` (1-based; cells must be positive) and keeps the
/// `max_features` highest-variance columns in their original order.
PreparedDataset prepare_dataset(const CsvDataset& csv,
                                const ExperimentConfig& config);

/// Runs every (setting, epsilon, trial) and every method on every test
/// point. Trial seeds depend only on the master seed and the trial key, so
/// the table does not depend on `threads`.
ResultsTable run_experiment(const ExperimentConfig& config);

/// As above with an already loaded dataset (ignored in simulation mode).
ResultsTable run_experiment(const ExperimentConfig& config,
                            const PreparedDataset* dataset);

}  // namespace dicp
