#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hinv/io.hpp"
#include "hinv/signal_model.hpp"

namespace hinv {

enum class ExperimentKind { kBoundValidation, kLambdaScaling, kVandermondeCheck, kTwoLevel, kAnalyticVsExact };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct Sweep {
  std::string parameter;
  std::vector<double> values;
};

/// Parsed experiment document:
///   {"kind", "model", "grid", "noise", "sweep", "trials", "base_seed", ...}
/// "sweep" may be one {"parameter", "values"} object or an array of them.
/// Kind-specific extras ("models", "cases", "total_time", "random_models",
/// "thresholds") stay in `doc` and are read by the runner.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kBoundValidation;
  std::optional<FrequencyModel> model;
  std::optional<SamplingGrid> grid;
  std::optional<NoiseSpec> noise;
  std::vector<Sweep> sweeps;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<std::string> output;
  json doc;

  const Sweep* find_sweep(const std::string& parameter) const;
  const Sweep& require_sweep(const std::string& parameter) const;
  // thresholds.<name> or the fallback.
  double threshold(const std::string& name, double fallback) const;
};

ExperimentConfig parse_experiment_config(const json& doc);

struct RunOptions {
  int jobs = 1;
  bool force = false;  // run bound-validation on inadmissible noise anyway
};

struct Report {
  ExperimentKind kind = ExperimentKind::kBoundValidation;
  std::string csv;
  json summary;
  bool passed = true;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> errors;  // |w~_k - w_k| T, positional pairing; empty on rank mismatch
  double max_error = 0.0;      // +inf on rank mismatch or failed inversion
  double bound_total = 0.0;
  double tightness = 0.0;      // max_error / bound_total, 0/0 -> 0
  int detected_rank = 0;
  bool admissible = false;
};

// splitmix64(base_seed ^ splitmix64(index)).
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index);

Report run_bound_validation(const ExperimentConfig& config, const RunOptions& options = {});
Report run_lambda_scaling(const ExperimentConfig& config, const RunOptions& options = {});
Report run_vandermonde_check(const ExperimentConfig& config, const RunOptions& options = {});
Report run_two_level(const ExperimentConfig& config, const RunOptions& options = {});
Report run_analytic_vs_exact(const ExperimentConfig& config, const RunOptions& options = {});
Report run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Calls f(i) for i in [0, count) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all workers stop.
template <typename F>
void parallel_for(std::size_t count, int jobs, F&& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace hinv
