#include "dicp/config.hpp"

#include "dicp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dicp {

std::string_view detector_choice_name(DetectorChoice d) {
  switch (d) {
    case DetectorChoice::none: return "none";
    case DetectorChoice::zscore: return "zscore";
    case DetectorChoice::ddc: return "ddc";
  }
  return "?";
}

std::string_view imputer_name(ImputerKind k) {
  switch (k) {
    case ImputerKind::mean: return "mean";
    case ImputerKind::knn: return "knn";
    case ImputerKind::mice: return "mice";
  }
  return "?";
}

ContaminationSpec ExperimentConfig::contamination(double epsilon) const {
  ContaminationSpec spec;
  spec.epsilon = epsilon;
  spec.mu_lo = mu_lo;
  spec.mu_hi = mu_hi;
  spec.sigma_lo = sigma_lo;
  spec.sigma_hi = sigma_hi;
  spec.fixed_value = outlier_value;
  return spec;
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (value.empty() || res.ec != std::errc() || res.ptr != end ||
      !std::isfinite(out))
    bad_value(key, value);
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (value.empty() || res.ec != std::errc() || res.ptr != end)
    bad_value(key, value);
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::vector<std::string> to_list(const std::string& value) {
  if (value.empty()) return {};
  return split_fields(value);
}

std::pair<double, double> to_range(const std::string& key,
                                   const std::string& value) {
  const auto parts = to_list(value);
  if (parts.size() != 2) bad_value(key, value);
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key,
                      const std::string& value) {
  if (key == "settings") {
    c.settings.clear();
    for (const auto& s : to_list(value)) c.settings.push_back(parse_setting(s));
  } else if (key == "dataset") {
    if (value.empty()) c.dataset.reset();
    else c.dataset = value;
  } else if (key == "d") {
    c.d = to_integer(key, value);
  } else if (key == "beta") {
    const auto parts = to_list(value);
    c.beta.resize(static_cast<Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
      c.beta(static_cast<Index>(i)) = to_double(key, parts[i]);
  } else if (key == "log_columns") {
    c.log_columns.clear();
    for (const auto& s : to_list(value)) c.log_columns.push_back(to_integer(key, s));
  } else if (key == "max_features") {
    c.max_features = to_integer(key, value);
  } else if (key == "inject") {
    c.inject = to_bool(key, value);
  } else if (key == "n_labeled") {
    c.n_labeled = to_integer(key, value);
  } else if (key == "n_test") {
    c.n_test = to_integer(key, value);
  } else if (key == "n_trials") {
    c.n_trials = to_integer(key, value);
  } else if (key == "n0") {
    c.n0 = to_integer(key, value);
  } else if (key == "alpha") {
    c.alpha = to_double(key, value);
  } else if (key == "epsilons") {
    c.epsilons.clear();
    for (const auto& s : to_list(value)) c.epsilons.push_back(to_double(key, s));
  } else if (key == "outlier_mu") {
    std::tie(c.mu_lo, c.mu_hi) = to_range(key, value);
  } else if (key == "outlier_sigma") {
    std::tie(c.sigma_lo, c.sigma_hi) = to_range(key, value);
  } else if (key == "outlier_value") {
    if (value.empty() || value == "none") c.outlier_value.reset();
    else c.outlier_value = to_double(key, value);
  } else if (key == "detector") {
    if (value == "none") c.detector = DetectorChoice::none;
    else if (value == "zscore") c.detector = DetectorChoice::zscore;
    else if (value == "ddc") c.detector = DetectorChoice::ddc;
    else bad_value(key, value);
  } else if (key == "detector_p") {
    c.detector_p = to_double(key, value);
  } else if (key == "z_threshold") {
    c.z_threshold = to_double(key, value);
  } else if (key == "ddc_corr_cutoff") {
    c.ddc_corr_cutoff = to_double(key, value);
  } else if (key == "imputer") {
    if (value == "mean") c.imputer = ImputerKind::mean;
    else if (value == "knn") c.imputer = ImputerKind::knn;
    else if (value == "mice") c.imputer = ImputerKind::mice;
    else bad_value(key, value);
  } else if (key == "knn_k") {
    c.knn_k = to_integer(key, value);
  } else if (key == "mice_sweeps") {
    c.mice_sweeps = static_cast<int>(to_integer(key, value));
  } else if (key == "score") {
    if (value == "abs") c.score = ScoreKind::abs_residual;
    else if (value == "cqr") c.score = ScoreKind::cqr;
    else bad_value(key, value);
  } else if (key == "methods") {
    c.methods.clear();
    for (const auto& s : to_list(value)) c.methods.push_back(parse_method(s));
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) bad_value(key, value);
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "threads") {
    c.threads = static_cast<int>(to_integer(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.n_labeled > 0 && c.n_test > 0 && c.n_trials > 0,
          "n_labeled, n_test and n_trials must be positive");
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
  require(!c.epsilons.empty(), "epsilons must not be empty");
  for (double e : c.epsilons)
    require(e >= 0.0 && e <= 1.0, "epsilon must lie in [0, 1]");
  require(!c.methods.empty(), "methods must not be empty");
  const Index n0 = c.resolved_n0();
  require(n0 > 1 && n0 <= c.n_labeled, "n0 must satisfy 1 < n0 <= n_labeled");
  require(c.mu_lo <= c.mu_hi && c.sigma_lo <= c.sigma_hi && c.sigma_lo >= 0.0,
          "outlier ranges must be ordered with nonnegative sigma");
  require(c.detector_p > 0.0 && c.detector_p < 1.0, "detector_p must lie in (0, 1)");
  require(c.z_threshold > 0.0, "z_threshold must be positive");
  require(c.ddc_corr_cutoff >= 0.0 && c.ddc_corr_cutoff < 1.0,
          "ddc_corr_cutoff must lie in [0, 1)");
  require(c.knn_k > 0, "knn_k must be positive");
  require(c.mice_sweeps > 0, "mice_sweeps must be positive");
  require(c.threads > 0, "threads must be positive");
  require(c.max_features >= 0, "max_features must be nonnegative");
  if (c.simulated()) {
    require(!c.settings.empty(), "settings must not be empty");
    require(c.d > 0, "d must be positive");
    require(c.beta.size() == 0 || c.beta.size() == c.d,
            "beta must have d entries");
  } else {
    for (Index col : c.log_columns) require(col >= 1, "log_columns are 1-based");
    if (!c.inject)
      for (Method m : c.methods)
        require(!method_needs_oracle(m),
                std::string("method ") + std::string(method_name(m)) +
                    " needs the true outlier mask: use simulation or inject = true");
  }
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  out << "settings = "
      << join(c.settings, [](Setting s) { return std::string(1, setting_name(s)); })
      << '\n';
  out << "dataset = " << (c.dataset ? c.dataset->string() : std::string()) << '\n';
  out << "d = " << c.d << '\n';
  std::vector<double> beta(c.beta.data(), c.beta.data() + c.beta.size());
  out << "beta = " << join(beta, num) << '\n';
  out << "log_columns = "
      << join(c.log_columns, [](Index i) { return std::to_string(i); }) << '\n';
  out << "max_features = " << c.max_features << '\n';
  out << "inject = " << (c.inject ? "true" : "false") << '\n';
  out << "n_labeled = " << c.n_labeled << '\n';
  out << "n_test = " << c.n_test << '\n';
  out << "n_trials = " << c.n_trials << '\n';
  out << "n0 = " << c.n0 << '\n';
  out << "alpha = " << num(c.alpha) << '\n';
  out << "epsilons = " << join(c.epsilons, num) << '\n';
  out << "outlier_mu = " << num(c.mu_lo) << ',' << num(c.mu_hi) << '\n';
  out << "outlier_sigma = " << num(c.sigma_lo) << ',' << num(c.sigma_hi) << '\n';
  out << "outlier_value = " << (c.outlier_value ? num(*c.outlier_value) : "none") << '\n';
  out << "detector = " << detector_choice_name(c.detector) << '\n';
  out << "detector_p = " << num(c.detector_p) << '\n';
  out << "z_threshold = " << num(c.z_threshold) << '\n';
  out << "ddc_corr_cutoff = " << num(c.ddc_corr_cutoff) << '\n';
  out << "imputer = " << imputer_name(c.imputer) << '\n';
  out << "knn_k = " << c.knn_k << '\n';
  out << "mice_sweeps = " << c.mice_sweeps << '\n';
  out << "score = " << (c.score == ScoreKind::cqr ? "cqr" : "abs") << '\n';
  out << "methods = "
      << join(c.methods, [](Method m) { return std::string(method_name(m)); })
      << '\n';
  out << "seed = " << c.seed << '\n';
  out << "output_dir = " << c.output_dir.string() << '\n';
  out << "threads = " << c.threads << '\n';
  return out.str();
}

}  // namespace dicp
