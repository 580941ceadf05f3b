#pragma once

#include "dicp/conformal.hpp"
#include "dicp/impute.hpp"
#include "dicp/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dicp {

enum class DetectorChoice { none, zscore, ddc };

std::string_view detector_choice_name(DetectorChoice d);
std::string_view imputer_name(ImputerKind k);

/// Experiment description. Read from flat `key = value` text; `#` starts a
/// comment and lists are comma separated.
struct ExperimentConfig {
  // Data source: synthetic settings, or a CSV when `dataset` is set.
  std::vector<Setting> settings{Setting::A};
  std::optional<std::filesystem::path> dataset;
  Index d = 15;
  Vector beta;  // empty means all ones
  std::vector<Index> log_columns;  // 1-based feature columns to log-transform
  Index max_features = 0;          // 0 keeps every column
  bool inject = false;             // contaminate external test rows

  Index n_labeled = 200;
  Index n_test = 100;
  Index n_trials = 200;
  Index n0 = 0;  // 0 selects floor(n/2) + 1
  double alpha = 0.1;
  std::vector<double> epsilons{0.1};

  double mu_lo = 0.0, mu_hi = 10.0;
  double sigma_lo = 0.0, sigma_hi = 10.0;
  std::optional<double> outlier_value;

  DetectorChoice detector = DetectorChoice::ddc;
  double detector_p = 0.95;
  double z_threshold = 3.0;
  double ddc_corr_cutoff = 0.5;

  ImputerKind imputer = ImputerKind::mean;
  Index knn_k = 5;
  int mice_sweeps = 10;

  ScoreKind score = ScoreKind::abs_residual;
  std::vector<Method> methods{Method::scp, Method::wcp, Method::baseline,
                              Method::pdi, Method::jdi};

  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "results";
  int threads = 1;

  bool simulated() const { return !dataset.has_value(); }
  Index resolved_n0() const { return n0 > 0 ? n0 : n_labeled / 2 + 1; }
  ContaminationSpec contamination(double epsilon) const;
};

/// Applies one `key = value` assignment; throws ConfigError on an unknown
/// key or a malformed value.
void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const ExperimentConfig& config);

/// Canonical text listing every key; parse_config reads it back unchanged.
std::string to_text(const ExperimentConfig& config);

}  // namespace dicp
