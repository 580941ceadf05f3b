#include "dicp/config.hpp"
#include "dicp/csv.hpp"
#include "dicp/detect.hpp"
#include "dicp/experiment.hpp"
#include "dicp/report.hpp"
#include "dicp/simulate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace dicp;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

int cmd_simulate(const std::string& setting, Index n, Index d,
                 std::uint64_t seed, const fs::path& out) {
  SettingSpec spec;
  spec.setting = parse_setting(setting);
  spec.d = d;
  spec.seed = seed;
  if (n < 1 || d < 1) throw ConfigError("n and d must be positive");
  write_csv(out, with_default_names(generate(spec, n, seed)));
  std::cout << "wrote " << n << " rows to " << out.string() << '\n';
  return 0;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& output_dir) {
  ExperimentConfig config;
  if (!config_path.empty()) config = load_config(config_path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!output_dir.empty()) config.output_dir = output_dir;
  validate(config);

  const ResultsTable table = run_experiment(config);
  const auto files = emit_report(table, config.output_dir);
  write_text(config.output_dir / "config.txt", to_text(config));
  for (const auto& f : files) std::cout << f.string() << '\n';
  std::cout << (config.output_dir / "config.txt").string() << '\n';
  return 0;
}

int cmd_detect(const fs::path& train_path, const fs::path& input_path,
               const std::string& kind, double p, double z, double cutoff) {
  const CsvDataset train = load_csv(train_path);
  const CsvDataset input = input_path.empty() ? train : load_csv(input_path);
  if (input.data.dim() != train.data.dim())
    throw DataError("input and training files have different widths");
  FittedDetector det = kind == "ddc"      ? fit_ddc(train.data.features, p, cutoff)
                       : kind == "zscore" ? fit_zscore(train.data.features, z)
                                          : throw ConfigError("unknown detector " + kind);
  std::cout << "row,flagged\n";
  for (Index i = 0; i < input.data.size(); ++i) {
    const CellMask mask = detect(det, input.data.features.row(i).transpose());
    std::cout << i + 1 << ',';
    bool first = true;
    for (Index j : mask.indices()) {
      std::cout << (first ? "" : " ") << input.feature_names[static_cast<std::size_t>(j)];
      first = false;
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_report(const fs::path& results, const fs::path& outdir,
               std::optional<double> alpha) {
  ResultsTable table;
  table.rows = read_results_csv(results);
  const fs::path config_path = results.parent_path() / "config.txt";
  std::optional<ExperimentConfig> config;
  if (fs::exists(config_path)) config = load_config(config_path);
  table.alpha = alpha ? *alpha : config ? config->alpha : 0.1;
  if (table.alpha <= 0.0 || table.alpha >= 1.0)
    throw ConfigError("alpha must lie in (0, 1)");
  const auto files = emit_report(table, outdir);
  for (const auto& f : files) std::cout << f.string() << '\n';
  if (config && fs::weakly_canonical(outdir) != fs::weakly_canonical(results.parent_path()))
    write_text(outdir / "config.txt", to_text(*config));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect-then-impute conformal prediction experiments"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Write a synthetic labeled CSV");
  std::string setting = "A";
  Index n = 200, d = 15;
  std::uint64_t seed = 1;
  std::string sim_out;
  sim->add_option("--setting", setting, "A, B or C");
  sim->add_option("-n,--rows", n, "number of rows");
  sim->add_option("-d,--dim", d, "number of features");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("-o,--out", sim_out, "output CSV")->required();

  auto* run = app.add_subcommand("run", "Run an experiment and write its report");
  std::string config_path, output_dir;
  std::vector<std::string> sets;
  run->add_option("-c,--config", config_path, "key = value config file");
  run->add_option("--set", sets, "override a config key (key=value)");
  run->add_option("-o,--output-dir", output_dir, "output directory");

  auto* det = app.add_subcommand("detect", "Fit a detector and print flagged cells");
  std::string train_path, input_path, kind = "ddc";
  double p = 0.99, z = 3.0, cutoff = 0.5;
  det->add_option("--train", train_path, "CSV the detector is fitted on")->required();
  det->add_option("--input", input_path, "CSV to screen (defaults to --train)");
  det->add_option("--detector", kind, "ddc or zscore");
  det->add_option("--p", p, "chi-square probability for ddc thresholds");
  det->add_option("--z", z, "z-score threshold");
  det->add_option("--cutoff", cutoff, "ddc correlation cutoff");

  auto* rep = app.add_subcommand("report", "Re-render summary and SVGs from results.csv");
  std::string results_path, report_out;
  std::optional<double> alpha;
  rep->add_option("--results", results_path, "results.csv")->required();
  rep->add_option("-o,--out", report_out, "output directory")->required();
  rep->add_option("--alpha", alpha, "miscoverage level for the reference line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(setting, n, d, seed, sim_out);
    if (*run) return cmd_run(config_path, sets, output_dir);
    if (*det) return cmd_detect(train_path, input_path, kind, p, z, cutoff);
    if (*rep) return cmd_report(results_path, report_out, alpha);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
