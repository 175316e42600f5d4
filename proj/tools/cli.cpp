#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "hinv/certainty.hpp"
#include "hinv/error.hpp"
#include "hinv/experiment.hpp"
#include "hinv/inversion.hpp"
#include "hinv/io.hpp"

namespace hinv {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string series;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> eta;
  std::optional<int> rank;
  std::optional<double> threshold;
  std::string lambda_source = "exact";
  bool force = false;
  int jobs = 1;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  return os;
}

// Writes `text` to --out, or to `out` when no path was given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    open_out(path) << text;
  }
}

int cmd_synth(const Options& o, std::ostream& out) {
  const auto cfg = parse_signal_config(load_json_file(o.config));
  auto series = synthesize_autocorrelation(cfg.model, cfg.grid);
  if (cfg.noise && cfg.noise->effective_eta() > 0.0) {
    NoiseSpec spec = *cfg.noise;
    if (o.seed) spec.seed = *o.seed;
    series = apply_noise(series, spec);
  }
  std::ostringstream os;
  write_series_csv(os, series);
  emit(o.out, os.str(), out);
  return kExitOk;
}

int cmd_invert(const Options& o, std::ostream& out) {
  std::ifstream in(o.series);
  if (!in) throw ConfigError("cannot open series file '" + o.series + "'");
  const double eta = o.eta.value_or(0.0);
  const auto series = read_series_csv(in, eta);
  const InversionConfig config{eta, o.rank, o.threshold};
  config.validate();
  const auto result = harmonic_invert(series, config);
  json j = result;
  j["eta_max"] = eta;
  j["certainty"] = certainty_bound(series, result.detected_rank, eta);
  emit(o.out, j.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const auto doc = load_json_file(o.config);
  const auto cfg = parse_signal_config(doc);
  double eta;
  if (o.eta) {
    eta = *o.eta;
  } else if (cfg.noise) {
    eta = cfg.noise->effective_eta();
  } else {
    throw ConfigError("bound: need --eta or a 'noise.eta_max' config field");
  }
  LambdaSource source;
  if (o.lambda_source == "exact") {
    source = LambdaSource::kExact;
  } else if (o.lambda_source == "analytic") {
    source = LambdaSource::kAnalytic;
  } else {
    throw ConfigError("--lambda-source: expected 'exact' or 'analytic'");
  }
  json j = certainty_bound(cfg.model, cfg.grid, eta, source);
  emit(o.out, j.dump(2) + "\n", out);
  return kExitOk;
}

int write_report(const Report& report, const std::string& path, std::ostream& out) {
  const std::string summary = report.summary.dump(2) + "\n";
  if (!path.empty()) {
    open_out(path) << report.csv;
    auto summary_path = std::filesystem::path(path).replace_extension(".summary.json");
    open_out(summary_path.string()) << summary;
  }
  out << summary;
  return report.passed ? kExitOk : kExitThreshold;
}

int cmd_experiment(const Options& o, std::ostream& out, std::optional<ExperimentKind> forced_kind) {
  auto doc = load_json_file(o.config);
  if (forced_kind && doc.is_object()) doc["kind"] = to_string(*forced_kind);
  auto config = parse_experiment_config(doc);
  if (o.seed) config.base_seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw ConfigError("--trials: must be >= 1");
    config.trials = *o.trials;
  }
  if (o.jobs < 1) throw ConfigError("--jobs: must be >= 1");
  const auto report = run_experiment(config, RunOptions{o.jobs, o.force});
  return write_report(report, o.out.empty() ? config.output.value_or("") : o.out, out);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic inversion with frequency-error certainty bounds"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Write the autocorrelation series of a model as CSV");
  synth->add_option("--config", o.config, "Model/grid/noise JSON")->required();
  synth->add_option("--out", o.out, "Output CSV (default stdout)");
  synth->add_option("--seed", o.seed, "Noise seed override");

  auto* invert = app.add_subcommand("invert", "Recover frequencies and amplitudes from a series CSV");
  invert->add_option("--series", o.series, "Series CSV")->required();
  invert->add_option("--eta", o.eta, "Noise ceiling eta_max");
  auto* rank = invert->add_option("--rank", o.rank, "Force the number of modes");
  invert->add_option("--threshold", o.threshold, "Rank-detection threshold")->excludes(rank);
  invert->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* bound = app.add_subcommand("bound", "Certainty bound and its ingredients for a model");
  bound->add_option("--config", o.config, "Model/grid JSON")->required();
  bound->add_option("--eta", o.eta, "Noise ceiling (default noise.eta_max)");
  bound->add_option("--lambda-source", o.lambda_source, "exact | analytic");
  bound->add_option("--out", o.out, "Output JSON (default stdout)");

  auto add_run_flags = [&o](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Experiment JSON")->required();
    cmd->add_option("--out", o.out, "Report CSV; summary goes next to it as .summary.json");
    cmd->add_option("--seed", o.seed, "Base seed override");
    cmd->add_option("--trials", o.trials, "Trial count override");
    cmd->add_option("--jobs", o.jobs, "Worker threads");
    cmd->add_flag("--force", o.force, "Run bound validation on inadmissible noise");
  };
  auto* vander = app.add_subcommand("check-vandermonde", "Exact vs approximate Vandermonde Gram determinants");
  add_run_flags(vander);
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo or sweep experiment");
  add_run_flags(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (invert->parsed()) return cmd_invert(o, out);
    if (bound->parsed()) return cmd_bound(o, out);
    if (vander->parsed()) return cmd_experiment(o, out, ExperimentKind::kVandermondeCheck);
    return cmd_experiment(o, out, std::nullopt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace hinv
