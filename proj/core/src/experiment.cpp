#include "hinv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "hinv/certainty.hpp"
#include "hinv/error.hpp"
#include "hinv/inversion.hpp"
#include "hinv/matrix_kit.hpp"
#include "hinv/stats.hpp"

namespace hinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json check(const std::string& name, double value, double threshold, bool passed) {
  return json{{"name", name}, {"value", jnum(value)}, {"threshold", jnum(threshold)}, {"passed", passed}};
}

bool all_passed(const json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("passed").get<bool>(); });
}

const FrequencyModel& require_model(const ExperimentConfig& config) {
  if (!config.model) throw ConfigError("config field 'model': missing");
  return *config.model;
}

const SamplingGrid& require_grid(const ExperimentConfig& config) {
  if (!config.grid) throw ConfigError("config field 'grid': missing delta_t/n_steps");
  return *config.grid;
}

const NoiseSpec& require_noise(const ExperimentConfig& config) {
  if (!config.noise) throw ConfigError("config field 'noise': missing");
  return *config.noise;
}

int require_int(const Sweep& sweep, double v) {
  if (v != std::floor(v) || v < 1 || v > std::numeric_limits<int>::max())
    throw ConfigError("config field 'sweep." + sweep.parameter + "': values must be positive integers");
  return static_cast<int>(v);
}

json ingredients(const CertaintyBound& b) {
  json j = b;
  return j;
}

// Max positional error |w~_k - w_k| T when the detected rank matches K. With a
// zero bound (eta = 0) errors up to `roundoff` count as exact agreement.
void score_trial(TrialRecord& rec, const FrequencyModel& model, const SamplingGrid& grid,
                 const std::optional<InversionResult>& result, double roundoff) {
  rec.errors.clear();
  if (!result || result->detected_rank != model.size()) {
    rec.max_error = kInf;
  } else {
    rec.max_error = 0.0;
    for (int k = 0; k < model.size(); ++k) {
      const double e = std::abs(result->omegas[k] - model.omegas()[k]) * grid.total_time();
      rec.errors.push_back(e);
      rec.max_error = std::max(rec.max_error, e);
    }
  }
  if (rec.bound_total > 0.0) {
    rec.tightness = rec.max_error / rec.bound_total;
  } else {
    rec.tightness = rec.max_error <= roundoff ? 0.0 : kInf;
  }
}

bool violated(const TrialRecord& r) {
  return r.bound_total > 0.0 ? !(r.max_error <= r.bound_total) : r.tightness != 0.0;
}

TrialRecord run_trial(const FrequencyModel& model, const SamplingGrid& grid, const AutocorrSeries& exact,
                      const NoiseSpec& noise, const InversionConfig& inversion, double bound_total,
                      bool admissible, int index, std::uint64_t seed, double roundoff) {
  TrialRecord rec;
  rec.trial = index;
  rec.seed = seed;
  rec.bound_total = bound_total;
  rec.admissible = admissible;

  NoiseSpec spec = noise;
  spec.seed = seed;
  const auto series = apply_noise(exact, spec);
  std::optional<InversionResult> result;
  try {
    result = harmonic_invert(series, inversion);
    rec.detected_rank = result->detected_rank;
  } catch (const NumericalError&) {
    rec.detected_rank = 0;
  }
  score_trial(rec, model, grid, result, roundoff);
  return rec;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(base_seed ^ splitmix64(index));
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  static const std::map<std::string, ExperimentKind> kinds{
      {"bound-validation", ExperimentKind::kBoundValidation},
      {"lambda-scaling", ExperimentKind::kLambdaScaling},
      {"vandermonde-check", ExperimentKind::kVandermondeCheck},
      {"two-level", ExperimentKind::kTwoLevel},
      {"analytic-vs-exact", ExperimentKind::kAnalyticVsExact}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw ConfigError("config field 'kind': unknown experiment kind '" + name + "'");
  return it->second;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kBoundValidation: return "bound-validation";
    case ExperimentKind::kLambdaScaling: return "lambda-scaling";
    case ExperimentKind::kVandermondeCheck: return "vandermonde-check";
    case ExperimentKind::kTwoLevel: return "two-level";
    case ExperimentKind::kAnalyticVsExact: return "analytic-vs-exact";
  }
  return "unknown";
}

const Sweep* ExperimentConfig::find_sweep(const std::string& parameter) const {
  for (const auto& s : sweeps)
    if (s.parameter == parameter) return &s;
  return nullptr;
}

const Sweep& ExperimentConfig::require_sweep(const std::string& parameter) const {
  if (const auto* s = find_sweep(parameter)) return *s;
  throw ConfigError("config field 'sweep': missing a sweep over '" + parameter + "'");
}

double ExperimentConfig::threshold(const std::string& name, double fallback) const {
  if (!doc.contains("thresholds")) return fallback;
  const auto& t = doc.at("thresholds");
  if (!t.contains(name)) return fallback;
  return field::number(t, name, "thresholds");
}

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment config: expected a JSON object");
  ExperimentConfig c;
  c.doc = doc;
  c.kind = parse_experiment_kind(field::text(doc, "kind", ""));
  if (doc.contains("model")) c.model = parse_model(doc);
  if (doc.contains("grid") && doc.at("grid").contains("delta_t")) c.grid = parse_grid(doc);
  c.noise = parse_noise(doc);
  if (doc.contains("trials")) {
    const auto t = field::integer(doc, "trials", "");
    if (t < 1 || t > std::numeric_limits<int>::max()) throw ConfigError("config field 'trials': must be >= 1");
    c.trials = static_cast<int>(t);
  }
  if (doc.contains("base_seed")) c.base_seed = field::u64(doc, "base_seed", "");
  if (doc.contains("output")) c.output = field::text(doc, "output", "");

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    std::vector<const json*> items;
    if (s.is_array()) {
      for (const auto& e : s) items.push_back(&e);
    } else {
      items.push_back(&s);
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string path = s.is_array() ? "sweep[" + std::to_string(i) + "]" : "sweep";
      Sweep sw{field::text(*items[i], "parameter", path), field::numbers(*items[i], "values", path)};
      if (sw.values.empty()) throw ConfigError("config field '" + path + ".values': must be non-empty");
      c.sweeps.push_back(std::move(sw));
    }
  }
  return c;
}

Report run_bound_validation(const ExperimentConfig& config, const RunOptions& options) {
  const auto& model = require_model(config);
  const auto& grid = require_grid(config);
  const auto& noise = require_noise(config);
  const double eta = noise.effective_eta();

  const auto bound = certainty_bound(model, grid, eta, LambdaSource::kExact);
  if (!bound.admissible && !options.force) {
    throw ConfigError("config field 'noise.eta_max': eta_max = " + num(eta) +
                      " is not admissible (needs < lambda_min/(2N) = " +
                      num(bound.lambda_min_exact / (2.0 * grid.n_steps)) + "); pass --force to run anyway");
  }

  const auto exact = synthesize_autocorrelation(model, grid);
  const InversionConfig inversion{eta, std::nullopt, std::nullopt};
  const double roundoff = config.threshold("noiseless_tolerance", 1e-6);
  std::vector<TrialRecord> records(config.trials);
  parallel_for(records.size(), options.jobs, [&](std::size_t i) {
    const auto seed = trial_seed(config.base_seed, i);
    records[i] = run_trial(model, grid, exact, noise, inversion, bound.bound_total, bound.admissible,
                           static_cast<int>(i), seed, roundoff);
  });

  std::ostringstream csv;
  csv << "trial,seed,k_detected,admissible,max_err_T,bound_total,tightness";
  for (int k = 0; k < model.size(); ++k) csv << ",err_T_" << k + 1;
  csv << '\n';
  int violations = 0, rank_ok = 0;
  std::vector<double> tightness;
  for (const auto& r : records) {
    csv << r.trial << ',' << r.seed << ',' << r.detected_rank << ',' << (r.admissible ? 1 : 0) << ','
        << num(r.max_error) << ',' << num(r.bound_total) << ',' << num(r.tightness);
    for (int k = 0; k < model.size(); ++k)
      csv << ',' << (r.errors.empty() ? std::string() : num(r.errors[k]));
    csv << '\n';
    if (violated(r)) ++violations;
    if (r.detected_rank == model.size()) ++rank_ok;
    tightness.push_back(r.tightness);
  }

  const double trials = static_cast<double>(records.size());
  const double violation_rate = violations / trials;
  const double max_rate = config.threshold("max_violation_rate", 0.01);
  json checks = json::array({check("violation_rate", violation_rate, max_rate, violation_rate <= max_rate)});

  Report report;
  report.kind = ExperimentKind::kBoundValidation;
  report.csv = csv.str();
  report.summary = {
      {"kind", to_string(report.kind)},
      {"trials", records.size()},
      {"base_seed", config.base_seed},
      {"k", model.size()},
      {"n_steps", grid.n_steps},
      {"delta_t", grid.delta_t},
      {"total_time", grid.total_time()},
      {"eta_max", eta},
      {"noise_kind", to_string(noise.kind)},
      {"ingredients", ingredients(bound)},
      {"violations", violations},
      {"violation_rate", violation_rate},
      {"rank_correct_rate", rank_ok / trials},
      {"tightness",
       {{"min", jnum(*std::min_element(tightness.begin(), tightness.end()))},
        {"median", jnum(stats::median(tightness))},
        {"max", jnum(*std::max_element(tightness.begin(), tightness.end()))}}},
      {"checks", checks}};
  report.passed = all_passed(checks);
  report.summary["passed"] = report.passed;
  return report;
}

Report run_lambda_scaling(const ExperimentConfig& config, const RunOptions& options) {
  std::vector<FrequencyModel> models;
  if (config.doc.contains("models")) {
    const auto& arr = config.doc.at("models");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config field 'models': expected a non-empty array");
    for (const auto& m : arr) models.push_back(parse_model(m));
  } else {
    models.push_back(require_model(config));
  }
  const auto n_steps = field::integer(field::require(config.doc, "grid", ""), "n_steps", "grid");
  if (n_steps < 1) throw ConfigError("config field 'grid.n_steps': must be >= 1");
  const auto& sweep = config.require_sweep("delta_t");
  const double regime = config.threshold("short_time_t_delta", 0.05);

  struct Point {
    double delta_t, t, t_delta, exact, analytic;
    bool warning;
  };
  const std::size_t per_model = sweep.values.size();
  std::vector<Point> points(models.size() * per_model);
  parallel_for(points.size(), options.jobs, [&](std::size_t i) {
    const auto& model = models[i / per_model];
    const SamplingGrid grid(sweep.values[i % per_model], static_cast<int>(n_steps));
    const double delta = model.size() >= 2 ? effective_delta(model) : 0.0;
    points[i] = {grid.delta_t,
                 grid.total_time(),
                 grid.total_time() * delta,
                 state_gram_eigenvalues(model, grid).back(),
                 lambda_min_analytic(model, grid).value,
                 grid.total_time() * delta > regime};
  });

  const double tolerance = config.threshold("slope_tolerance", 0.02);
  const auto min_points = static_cast<std::size_t>(config.threshold("min_points", 8));
  std::ostringstream csv;
  csv << "model,k,n_steps,delta_t,total_time,t_delta,lambda_min_exact,lambda_min_analytic,short_time_warning\n";
  json fits = json::array();
  json checks = json::array();
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<double> log_t, log_lambda;
    for (std::size_t j = 0; j < per_model; ++j) {
      const auto& p = points[m * per_model + j];
      csv << m << ',' << models[m].size() << ',' << n_steps << ',' << num(p.delta_t) << ',' << num(p.t) << ','
          << num(p.t_delta) << ',' << num(p.exact) << ',' << num(p.analytic) << ',' << (p.warning ? 1 : 0) << '\n';
      if (!p.warning && p.exact > 0.0) {
        log_t.push_back(std::log(p.t));
        log_lambda.push_back(std::log(p.exact));
      }
    }
    const int k = models[m].size();
    const double expected = 2.0 * (k - 1);
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (log_t.size() >= 2) slope = stats::ols_slope(log_t, log_lambda);
    const double deviation = expected > 0 ? std::abs(slope - expected) / expected : std::abs(slope);
    const bool ok = log_t.size() >= min_points && deviation <= tolerance;
    fits.push_back({{"model", m},
                    {"k", k},
                    {"slope", jnum(slope)},
                    {"expected", expected},
                    {"relative_deviation", jnum(deviation)},
                    {"points_used", log_t.size()},
                    {"passed", ok}});
    checks.push_back(check("slope_k" + std::to_string(k) + "_model" + std::to_string(m), deviation, tolerance, ok));
  }

  Report report;
  report.kind = ExperimentKind::kLambdaScaling;
  report.csv = csv.str();
  report.summary = {{"kind", to_string(report.kind)}, {"n_steps", n_steps}, {"fits", fits}, {"checks", checks}};
  report.passed = all_passed(checks);
  report.summary["passed"] = report.passed;
  return report;
}

Report run_vandermonde_check(const ExperimentConfig& config, const RunOptions& options) {
  struct Case {
    std::vector<double> omegas;
    int n_steps;
  };
  std::vector<Case> cases;
  if (config.doc.contains("cases")) {
    const auto& arr = config.doc.at("cases");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config field 'cases': expected a non-empty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "cases[" + std::to_string(i) + "]";
      auto omegas = field::numbers(arr[i], "omegas", path);
      const auto n = field::integer(arr[i], "n_steps", path);
      if (omegas.empty() || n < static_cast<long long>(omegas.size()))
        throw ConfigError("config field '" + path + "': needs K >= 1 and n_steps >= K");
      std::sort(omegas.begin(), omegas.end());
      if (std::adjacent_find(omegas.begin(), omegas.end()) != omegas.end())
        throw ConfigError("config field '" + path + ".omegas': duplicate frequency");
      cases.push_back({std::move(omegas), static_cast<int>(n)});
    }
  } else {
    const auto& model = require_model(config);
    const auto n = field::integer(field::require(config.doc, "grid", ""), "n_steps", "grid");
    cases.push_back({{model.omegas().begin(), model.omegas().end()}, static_cast<int>(n)});
  }

  // delta_t either directly or as delta_t * max frequency gap.
  const Sweep* scaled = config.find_sweep("dt_dw_max");
  const Sweep& sweep = scaled ? *scaled : config.require_sweep("delta_t");
  std::vector<double> steps = sweep.values;
  std::sort(steps.begin(), steps.end(), std::greater<>());

  struct Row {
    double delta_t, dt_dw, exact, approx, ratio;
  };
  const std::size_t per_case = steps.size();
  std::vector<Row> rows(cases.size() * per_case);
  parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
    const auto& c = cases[i / per_case];
    const double span = c.omegas.back() - c.omegas.front();
    const double v = steps[i % per_case];
    double dt = v;
    if (scaled) {
      if (span == 0.0) throw ConfigError("vandermonde-check: dt_dw_max sweep needs K >= 2");
      dt = v / span;
    }
    const SamplingGrid grid(dt, c.n_steps);
    const double exact = vandermonde_gram_det_exact(c.omegas, grid);
    const double approx = vandermonde_gram_det_approx(c.omegas, grid);
    rows[i] = {dt, dt * span, exact, approx, exact / approx};
  });

  const double tolerance = config.threshold("ratio_tolerance", 0.01);
  std::ostringstream csv;
  csv << "case,k,n_steps,delta_t,dt_dw_max,det_exact,det_approx,ratio,abs_deviation,flag\n";
  json summary_cases = json::array();
  json checks = json::array();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    bool monotone = true;
    double prev = kInf;
    for (std::size_t j = 0; j < per_case; ++j) {
      const auto& r = rows[c * per_case + j];
      const double dev = std::abs(r.ratio - 1.0);
      csv << c << ',' << cases[c].omegas.size() << ',' << cases[c].n_steps << ',' << num(r.delta_t) << ','
          << num(r.dt_dw) << ',' << num(r.exact) << ',' << num(r.approx) << ',' << num(r.ratio) << ','
          << num(dev) << ',' << (dev > tolerance ? 1 : 0) << '\n';
      if (dev > prev + 1e-12) monotone = false;
      prev = dev;
    }
    const auto& last = rows[c * per_case + per_case - 1];
    const double dev = std::abs(last.ratio - 1.0);
    const std::string tag = "k" + std::to_string(cases[c].omegas.size()) + "_n" + std::to_string(cases[c].n_steps);
    checks.push_back(check("ratio_" + tag, dev, tolerance, dev <= tolerance));
    checks.push_back(check("monotone_" + tag, monotone ? 1.0 : 0.0, 1.0, monotone));
    summary_cases.push_back({{"case", c},
                             {"k", cases[c].omegas.size()},
                             {"n_steps", cases[c].n_steps},
                             {"ratio_at_smallest_dt", jnum(last.ratio)},
                             {"monotone", monotone}});
  }

  Report report;
  report.kind = ExperimentKind::kVandermondeCheck;
  report.csv = csv.str();
  report.summary = {{"kind", to_string(report.kind)}, {"cases", summary_cases}, {"checks", checks}};
  report.passed = all_passed(checks);
  report.summary["passed"] = report.passed;
  return report;
}

Report run_two_level(const ExperimentConfig& config, const RunOptions& options) {
  const auto& model = require_model(config);
  if (model.size() != 2) throw ConfigError("config field 'model': two-level experiment needs exactly 2 modes");
  const auto& noise = require_noise(config);
  double total_time;
  if (config.doc.contains("total_time")) {
    total_time = field::number(config.doc, "total_time", "");
  } else {
    total_time = require_grid(config).total_time();
  }
  if (!(total_time > 0.0)) throw ConfigError("config field 'total_time': must be > 0");

  const auto& n_sweep = config.require_sweep("n_steps");
  const auto& m_sweep = config.require_sweep("copies");
  std::vector<int> ns, ms;
  for (double v : n_sweep.values) ns.push_back(require_int(n_sweep, v));
  for (double v : m_sweep.values) ms.push_back(require_int(m_sweep, v));
  std::sort(ns.begin(), ns.end());
  std::sort(ms.begin(), ms.end());
  for (int n : ns)
    if (n < 2) throw ConfigError("config field 'sweep.n_steps': values must be >= K = 2");

  struct Cell {
    int n, m;
    SamplingGrid grid;
    double eta;
    CertaintyBound bound;
    double analytic;
    std::vector<TrialRecord> trials;
  };
  std::vector<Cell> cells;
  for (int n : ns) {
    for (int m : ms) {
      const SamplingGrid grid(total_time / n, n);
      NoiseSpec spec = noise;
      spec.copies = m;
      const double eta = spec.effective_eta();
      auto bound = certainty_bound(model, grid, eta, LambdaSource::kExact);
      const double analytic = lambda_min_analytic(model, grid).value;
      cells.push_back({n, m, grid, eta, bound, analytic, {}});
    }
  }

  // Flatten (cell, trial) for the worker pool; inadmissible cells get no trials.
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!cells[c].bound.admissible) continue;
    cells[c].trials.resize(config.trials);
    for (int t = 0; t < config.trials; ++t) jobs.emplace_back(c, t);
  }
  const double roundoff = config.threshold("noiseless_tolerance", 1e-6);
  std::vector<AutocorrSeries> exact;
  for (const auto& cell : cells) exact.push_back(synthesize_autocorrelation(model, cell.grid));
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const auto [c, t] = jobs[i];
    auto& cell = cells[c];
    NoiseSpec spec = noise;
    spec.copies = cell.m;
    const InversionConfig inversion{cell.eta, model.size(), std::nullopt};
    const auto seed = trial_seed(config.base_seed, c * static_cast<std::uint64_t>(config.trials) + t);
    cell.trials[t] =
        run_trial(model, cell.grid, exact[c], spec, inversion, cell.bound.bound_total, true, t, seed, roundoff);
  });

  std::ostringstream csv;
  csv << "n_steps,copies,delta_t,eta_max,admissible,lambda_min_exact,lambda_min_analytic,"
         "lambda_analytic_over_t2,bound_total,median_err_T,max_err_T,violation_rate\n";
  json cell_summary = json::array();
  std::map<int, std::vector<const Cell*>> by_n;
  for (const auto& cell : cells) {
    std::vector<double> errs;
    int violations = 0;
    for (const auto& r : cell.trials) {
      errs.push_back(r.max_error);
      if (violated(r)) ++violations;
    }
    const double median = stats::median(errs);
    const double max_err = errs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : *std::max_element(errs.begin(), errs.end());
    const double rate = errs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : static_cast<double>(violations) / errs.size();
    const double t2 = total_time * total_time;
    csv << cell.n << ',' << cell.m << ',' << num(cell.grid.delta_t) << ',' << num(cell.eta) << ','
        << (cell.bound.admissible ? 1 : 0) << ',' << num(cell.bound.lambda_min_exact) << ','
        << num(cell.analytic) << ',' << num(cell.analytic / t2) << ',' << num(cell.bound.bound_total) << ','
        << num(median) << ',' << num(max_err) << ',' << num(rate) << '\n';
    cell_summary.push_back({{"n_steps", cell.n},
                            {"copies", cell.m},
                            {"admissible", cell.bound.admissible},
                            {"skipped", !cell.bound.admissible},
                            {"lambda_min_exact", cell.bound.lambda_min_exact},
                            {"lambda_min_analytic", cell.analytic},
                            {"kappa", cell.bound.kappa},
                            {"trace_s", cell.bound.trace_s},
                            {"delta_eff", jnum(cell.bound.delta_eff.value_or(0.0))},
                            {"bound_total", cell.bound.bound_total},
                            {"median_err_T", jnum(median)},
                            {"violation_rate", jnum(rate)}});
    by_n[cell.n].push_back(&cell);
  }

  const double p_threshold = config.threshold("p_value", 0.01);
  json checks = json::array();
  json correlations = json::array();
  for (const auto& [n, row] : by_n) {
    // Bound halves per 4x copies.
    for (const auto* a : row) {
      for (const auto* b : row) {
        if (b->m != 4 * a->m || !a->bound.admissible || !b->bound.admissible) continue;
        const double ratio = a->bound.bound_total / b->bound.bound_total;
        checks.push_back(check("bound_halving_n" + std::to_string(n) + "_m" + std::to_string(a->m), ratio, 2.0,
                               ratio == 2.0));
      }
    }
    std::vector<double> copies, errors, medians;
    for (const auto* c : row) {
      if (!c->bound.admissible) continue;
      for (const auto& r : c->trials) {
        copies.push_back(c->m);
        errors.push_back(r.max_error);
      }
      std::vector<double> e;
      for (const auto& r : c->trials) e.push_back(r.max_error);
      medians.push_back(stats::median(e));
    }
    bool medians_decrease = medians.size() >= 2;
    for (std::size_t i = 1; i < medians.size(); ++i) medians_decrease &= medians[i] < medians[i - 1];
    json corr = {{"n_steps", n}, {"medians_decrease", medians_decrease}};
    if (copies.size() >= 3 && std::adjacent_find(copies.begin(), copies.end(), std::not_equal_to<>()) != copies.end()) {
      const auto sp = stats::spearman(copies, errors);
      corr["rho"] = sp.rho;
      corr["p_value"] = sp.p_value;
      checks.push_back(check("spearman_n" + std::to_string(n), sp.p_value, p_threshold,
                             sp.rho < 0.0 && sp.p_value < p_threshold));
    }
    correlations.push_back(corr);
  }

  Report report;
  report.kind = ExperimentKind::kTwoLevel;
  report.csv = csv.str();
  report.summary = {{"kind", to_string(report.kind)},
                    {"total_time", total_time},
                    {"eta_base", noise.eta_max},
                    {"trials_per_cell", config.trials},
                    {"cells", cell_summary},
                    {"correlations", correlations},
                    {"checks", checks}};
  report.passed = all_passed(checks);
  report.summary["passed"] = report.passed;
  return report;
}

Report run_analytic_vs_exact(const ExperimentConfig& config, const RunOptions& options) {
  const json spec = config.doc.contains("random_models") ? config.doc.at("random_models") : json::object();
  const std::string path = "random_models";
  auto get = [&](const std::string& key, double fallback) {
    return spec.contains(key) ? field::number(spec, key, path) : fallback;
  };
  std::vector<int> k_values{2, 3, 4};
  if (spec.contains("k_values")) {
    k_values.clear();
    for (double v : field::numbers(spec, "k_values", path)) {
      if (v < 2 || v != std::floor(v)) throw ConfigError("config field 'random_models.k_values': integers >= 2");
      k_values.push_back(static_cast<int>(v));
    }
  }
  const int count = static_cast<int>(get("count", 50));
  const int n_max = static_cast<int>(get("n_max", 12));
  const int n_min = static_cast<int>(get("n_min", 2));
  const double w_lo = get("omega_min", 0.0), w_hi = get("omega_max", 3.0);
  const double d_lo = get("amp_min", 0.1), d_hi = get("amp_max", 1.0);
  if (count < 1) throw ConfigError("config field 'random_models.count': must be >= 1");
  if (!(w_hi > w_lo) || !(d_lo > 0.0) || !(d_hi >= d_lo))
    throw ConfigError("config field 'random_models': invalid omega/amp ranges");

  const auto& sweep = config.require_sweep("t_dw_max");
  std::vector<double> steps = sweep.values;
  std::sort(steps.begin(), steps.end(), std::greater<>());

  struct Sample {
    FrequencyModel model;
    int n_steps;
  };
  std::vector<Sample> samples;
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    const int k = k_values[ki];
    for (int i = 0; i < count; ++i) {
      std::mt19937_64 rng(trial_seed(config.base_seed, ki * static_cast<std::uint64_t>(count) + i));
      std::uniform_real_distribution<double> w_dist(w_lo, w_hi), d_dist(d_lo, d_hi);
      std::uniform_int_distribution<int> n_dist(std::max(k, n_min), std::max({k, n_min, n_max}));
      std::vector<double> w, d;
      // Rejection keeps modes at least 1% of the range apart.
      while (true) {
        w.clear();
        for (int j = 0; j < k; ++j) w.push_back(w_dist(rng));
        std::sort(w.begin(), w.end());
        bool ok = true;
        for (int j = 1; j < k; ++j) ok &= w[j] - w[j - 1] > 0.01 * (w_hi - w_lo);
        if (ok) break;
      }
      for (int j = 0; j < k; ++j) d.push_back(d_dist(rng));
      samples.push_back({FrequencyModel(w, d), n_dist(rng)});
    }
  }

  struct Point {
    double delta_t, exact, analytic, ratio;
    bool excluded;
  };
  const double floor = config.threshold("floor", 1e-40);
  const std::size_t per_model = steps.size();
  std::vector<Point> points(samples.size() * per_model);
  parallel_for(points.size(), options.jobs, [&](std::size_t i) {
    const auto& s = samples[i / per_model];
    const double dt = steps[i % per_model] / (s.n_steps * s.model.max_gap());
    const SamplingGrid grid(dt, s.n_steps);
    const double exact = state_gram_eigenvalues(s.model, grid).back();
    const double analytic = lambda_min_analytic(s.model, grid).value;
    const double trace = s.n_steps * s.model.amp_sum();
    points[i] = {dt, exact, analytic, analytic / exact, !(exact / trace >= floor)};
  });

  const double tolerance = config.threshold("ratio_tolerance", 0.1);
  const double regime = config.threshold("regime_t_dw_max", 0.05);
  std::ostringstream csv;
  csv << "model,k,n_steps,t_dw_max,delta_t,lambda_min_exact,lambda_min_analytic,ratio,excluded\n";
  std::map<int, json> per_k;
  for (int k : k_values) per_k[k] = {{"k", k}, {"models", 0}, {"points", 0}, {"excluded", 0},
                                     {"max_abs_deviation", 0.0}, {"non_monotone_models", 0}};
  for (std::size_t m = 0; m < samples.size(); ++m) {
    const int k = samples[m].model.size();
    auto& agg = per_k[k];
    agg["models"] = agg["models"].get<int>() + 1;
    double prev = kInf;
    bool monotone = true;
    for (std::size_t j = 0; j < per_model; ++j) {
      const auto& p = points[m * per_model + j];
      csv << m << ',' << k << ',' << samples[m].n_steps << ',' << num(steps[j]) << ',' << num(p.delta_t) << ','
          << num(p.exact) << ',' << num(p.analytic) << ',' << num(p.ratio) << ',' << (p.excluded ? 1 : 0) << '\n';
      if (p.excluded) {
        agg["excluded"] = agg["excluded"].get<int>() + 1;
        continue;
      }
      const double dev = std::abs(p.ratio - 1.0);
      if (steps[j] <= regime) {
        agg["points"] = agg["points"].get<int>() + 1;
        agg["max_abs_deviation"] = std::max(agg["max_abs_deviation"].get<double>(), dev);
      }
      if (dev > prev) monotone = false;
      prev = dev;
    }
    if (!monotone) agg["non_monotone_models"] = agg["non_monotone_models"].get<int>() + 1;
  }

  json checks = json::array();
  json groups = json::array();
  for (auto& [k, agg] : per_k) {
    const double dev = agg["max_abs_deviation"].get<double>();
    const bool has_points = agg["points"].get<int>() > 0;
    checks.push_back(check("ratio_k" + std::to_string(k), dev, tolerance, has_points && dev <= tolerance));
    const int bad = agg["non_monotone_models"].get<int>();
    checks.push_back(check("monotone_k" + std::to_string(k), bad, 0.0, bad == 0));
    groups.push_back(agg);
  }

  Report report;
  report.kind = ExperimentKind::kAnalyticVsExact;
  report.csv = csv.str();
  report.summary = {{"kind", to_string(report.kind)}, {"floor", floor}, {"groups", groups}, {"checks", checks}};
  report.passed = all_passed(checks);
  report.summary["passed"] = report.passed;
  return report;
}

Report run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  switch (config.kind) {
    case ExperimentKind::kBoundValidation: return run_bound_validation(config, options);
    case ExperimentKind::kLambdaScaling: return run_lambda_scaling(config, options);
    case ExperimentKind::kVandermondeCheck: return run_vandermonde_check(config, options);
    case ExperimentKind::kTwoLevel: return run_two_level(config, options);
    case ExperimentKind::kAnalyticVsExact: return run_analytic_vs_exact(config, options);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace hinv
