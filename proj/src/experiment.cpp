#include "dicp/experiment.hpp"

#include "dicp/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

namespace dicp {

PreparedDataset prepare_dataset(const CsvDataset& csv,
                                const ExperimentConfig& config) {
  LabeledDataset data = csv.data;
  const Index d = data.dim();
  for (Index col : config.log_columns) {
    if (col < 1 || col > d)
      throw ConfigError("log column " + std::to_string(col) + " out of range");
    auto column = data.features.col(col - 1);
    if ((column.array() <= 0.0).any())
      throw DataError("log column " + std::to_string(col) +
                      " has nonpositive cells");
    column = column.array().log().matrix();
  }

  PreparedDataset out;
  out.kept_columns.resize(static_cast<std::size_t>(d));
  std::iota(out.kept_columns.begin(), out.kept_columns.end(), Index{0});
  if (config.max_features > 0 && config.max_features < d) {
    Vector var(d);
    for (Index j = 0; j < d; ++j) {
      const auto col = data.features.col(j).array();
      var(j) = (col - col.mean()).square().sum();
    }
    std::stable_sort(out.kept_columns.begin(), out.kept_columns.end(),
                     [&](Index a, Index b) { return var(a) > var(b); });
    out.kept_columns.resize(static_cast<std::size_t>(config.max_features));
    std::sort(out.kept_columns.begin(), out.kept_columns.end());
    Matrix kept(data.size(), config.max_features);
    for (Index k = 0; k < config.max_features; ++k)
      kept.col(k) = data.features.col(out.kept_columns[static_cast<std::size_t>(k)]);
    data.features = std::move(kept);
  }
  out.data = std::move(data);
  return out;
}

namespace {

struct TrialKey {
  Index source = 0;  // setting position, or 0 for a dataset
  std::string label;
  Setting setting = Setting::A;
  Index eps_index = 0;
  double epsilon = 0.0;
  Index trial = 0;
};

struct TrialOutput {
  std::vector<ResultRow> rows;
  std::optional<TrialDiagnostics> diagnostics;
};

struct TrialData {
  LabeledDataset labeled;
  LabeledDataset test;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TrialData simulated_data(const ExperimentConfig& c, Setting s,
                         std::uint64_t data_seed) {
  SettingSpec spec;
  spec.setting = s;
  spec.d = c.d;
  spec.beta = c.beta;
  spec.seed = c.seed;
  const DataGenerator gen(spec, derive_seed(data_seed, 3));
  return {gen.generate(c.n_labeled, derive_seed(data_seed, 1)),
          gen.generate(c.n_test, derive_seed(data_seed, 2))};
}

TrialData external_data(const ExperimentConfig& c, const PreparedDataset& ds,
                        std::uint64_t data_seed) {
  const Index n = ds.data.size();
  if (c.n_labeled + c.n_test > n)
    throw DataError("dataset has " + std::to_string(n) +
                    " rows, fewer than n_labeled + n_test");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(derive_seed(data_seed, 1));
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::span<const Index> all(perm);
  return {take_rows(ds.data, all.subspan(0, static_cast<std::size_t>(c.n_labeled))),
          take_rows(ds.data, all.subspan(static_cast<std::size_t>(c.n_labeled),
                                         static_cast<std::size_t>(c.n_test)))};
}

FittedDetector fit_detector(const ExperimentConfig& c, const Matrix& train) {
  switch (c.detector) {
    case DetectorChoice::none: return FittedDetector::inert(train.cols());
    case DetectorChoice::zscore: return fit_zscore(train, c.z_threshold);
    case DetectorChoice::ddc: return fit_ddc(train, c.detector_p, c.ddc_corr_cutoff);
  }
  throw ConfigError("unknown detector");
}

TrialOutput run_trial(const ExperimentConfig& c, const TrialKey& key,
                      const PreparedDataset* dataset) {
  const std::uint64_t data_seed =
      derive_seed(c.seed, static_cast<std::uint64_t>(key.source) + 1,
                  static_cast<std::uint64_t>(key.trial));
  const std::uint64_t cont_seed =
      derive_seed(data_seed, 100 + static_cast<std::uint64_t>(key.eps_index));

  const TrialData data = c.simulated()
                             ? simulated_data(c, key.setting, data_seed)
                             : external_data(c, *dataset, data_seed);
  auto [train, calib] = split(data.labeled, SplitIndex{c.resolved_n0()});

  FittedDetector detector = fit_detector(c, train.features);
  ImputerParams ip;
  ip.knn_k = c.knn_k;
  ip.mice_sweeps = c.mice_sweeps;
  FittedImputer imputer = fit_imputer(c.imputer, train.features, ip);
  Predictor predictor = c.score == ScoreKind::cqr
                            ? Predictor(fit_quantile_pair(train, c.alpha))
                            : Predictor(fit_ols(train));
  const ConformalContext ctx(std::move(predictor), c.score, std::move(detector),
                             std::move(imputer), calib, c.alpha);

  const bool contaminated = c.simulated() || c.inject;
  const ContaminationSpec cspec = c.contamination(key.epsilon);
  const Index d = data.test.dim();
  std::vector<TestCase> tests;
  tests.reserve(static_cast<std::size_t>(c.n_test));
  if (contaminated) {
    const OutlierLaw law = draw_outlier_law(cspec, d, derive_seed(cont_seed, 0));
    for (Index i = 0; i < c.n_test; ++i) {
      TestCase t = contaminate(data.test.features.row(i).transpose(), cspec, law,
                               derive_seed(cont_seed, 1, static_cast<std::uint64_t>(i)));
      t.y_true = data.test.labels(i);
      tests.push_back(std::move(t));
    }
  } else {
    for (Index i = 0; i < c.n_test; ++i) {
      tests.push_back(TestCase{std::nullopt, data.test.features.row(i).transpose(),
                               std::nullopt, data.test.labels(i)});
    }
  }

  std::optional<WeightModel> weights;
  if (std::find(c.methods.begin(), c.methods.end(), Method::wcp) != c.methods.end()) {
    Matrix observed(c.n_test, d);
    for (Index i = 0; i < c.n_test; ++i)
      observed.row(i) = tests[static_cast<std::size_t>(i)].x_observed.transpose();
    weights = fit_weight_model(calib.features, observed);
  }

  TprFdr rates{kNaN, kNaN};
  TrialOutput out;
  if (contaminated) {
    std::vector<DetectionRecord> records;
    TrialDiagnostics diag{key.label, key.epsilon, key.trial};
    double jaccard_sum = 0.0;
    Index sure = 0;
    for (const TestCase& t : tests) {
      const CellMask found = detect(ctx.detector(), t.x_observed);
      const CellMask clean = detect(ctx.detector(), *t.x_clean);
      records.push_back(detection_record(found, *t.true_mask));
      if (t.true_mask->is_subset_of(found)) ++sure;
      const CellMask fd_obs = found - *t.true_mask;
      const CellMask fd_clean = clean - *t.true_mask;
      jaccard_sum += jaccard(fd_obs, fd_clean);
      if (fd_obs.empty() && fd_clean.empty()) ++diag.empty_both;
      if (found.is_full()) ++diag.full_masks;
    }
    rates = tpr_fdr(records, Averaging::pooled);
    const auto n = static_cast<double>(tests.size());
    diag.sure_detection = static_cast<double>(sure) / n;
    diag.jaccard_mean = jaccard_sum / n;
    out.diagnostics = diag;
  }

  for (Method m : c.methods) {
    std::vector<IntervalRecord> records;
    records.reserve(tests.size());
    for (const TestCase& t : tests) {
      const PredictionInterval pi =
          interval(ctx, m, t, weights ? &*weights : nullptr);
      records.push_back({pi.contains(*t.y_true), pi.length()});
    }
    ResultRow row;
    row.method = std::string(method_name(m));
    row.setting = key.label;
    row.epsilon = key.epsilon;
    row.trial = key.trial;
    row.coverage = coverage(records);
    row.avg_length = average_length(records);
    row.inf_frac = infinite_fraction(records);
    row.tpr = rates.tpr;
    row.fdr = rates.fdr;
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& config,
                            const PreparedDataset* dataset) {
  validate(config);
  if (!config.simulated() && dataset == nullptr)
    throw Error("dataset mode requires a loaded dataset");

  std::vector<TrialKey> keys;
  const Index sources =
      config.simulated() ? static_cast<Index>(config.settings.size()) : 1;
  for (Index s = 0; s < sources; ++s)
    for (std::size_t e = 0; e < config.epsilons.size(); ++e)
      for (Index t = 0; t < config.n_trials; ++t) {
        TrialKey key;
        key.source = s;
        if (config.simulated()) {
          key.setting = config.settings[static_cast<std::size_t>(s)];
          key.label = std::string(1, setting_name(key.setting));
        } else {
          key.label = "data";
        }
        key.eps_index = static_cast<Index>(e);
        key.epsilon = config.epsilons[e];
        key.trial = t;
        keys.push_back(std::move(key));
      }

  std::vector<TrialOutput> outputs(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < keys.size(); i = next++) {
      try {
        outputs[i] = run_trial(config, keys[i], dataset);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(
      static_cast<std::size_t>(config.threads), keys.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  ResultsTable table;
  table.alpha = config.alpha;
  for (auto& out : outputs) {
    for (auto& row : out.rows) table.rows.push_back(std::move(row));
    if (out.diagnostics) table.diagnostics.push_back(*out.diagnostics);
  }
  return table;
}

ResultsTable run_experiment(const ExperimentConfig& config) {
  validate(config);
  if (config.simulated()) return run_experiment(config, nullptr);
  const PreparedDataset prepared =
      prepare_dataset(load_csv(*config.dataset), config);
  return run_experiment(config, &prepared);
}

}  // namespace dicp
