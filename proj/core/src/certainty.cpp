#include "hinv/certainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "detail/extended.hpp"
#include "hinv/error.hpp"

namespace hinv {

namespace {

double log_sum_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

// log(d_k prod_{j != k} (w_k - w_j)^2) for every k.
std::vector<double> log_mode_weights(const FrequencyModel& model) {
  const auto w = model.omegas();
  const auto d = model.amps();
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    double acc = std::log(d[k]);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j == k) continue;
      const double gap = std::abs(w[k] - w[j]);
      if (gap == 0.0) throw NumericalError("coincident frequencies");
      acc += 2.0 * std::log(gap);
    }
    out[k] = acc;
  }
  return out;
}

void require_modes(const FrequencyModel& model, const SamplingGrid& grid, int min_k, const char* what) {
  if (model.size() < min_k)
    throw ConfigError(std::string(what) + ": needs K >= " + std::to_string(min_k));
  if (grid.n_steps < model.size()) throw ConfigError(std::string(what) + ": N < K");
}

}  // namespace

ConditionNumber condition_number(double lambda_1, double lambda_min, double trace) {
  if (!(lambda_min > 0.0)) throw NumericalError("condition number: lambda_min <= 0");
  return {std::sqrt(lambda_1 / lambda_min), std::sqrt(trace / lambda_min)};
}

ConditionNumber condition_number(const SpectralData& spectrum, int k) {
  if (k < 1 || k > spectrum.size()) throw ConfigError("condition number: rank out of range");
  return condition_number(spectrum.eigenvalues(0), spectrum.eigenvalues(k - 1),
                          spectrum.eigenvalues.sum());
}

ConditionNumber condition_number(const FrequencyModel& model, const SamplingGrid& grid) {
  const auto ev = state_gram_eigenvalues(model, grid);
  return condition_number(ev.front(), ev.back(), grid.n_steps * model.amp_sum());
}

double lambda_min_general_formula(const FrequencyModel& model, const SamplingGrid& grid) {
  require_modes(model, grid, 2, "lambda_min general formula");
  const int k = model.size();
  const int n = grid.n_steps;
  // (N+K-1)! / ((N-K)! (2K-1)) * [(K-1)! / (2K-2)!]^2
  const double log_prefactor = std::lgamma(n + k) - std::lgamma(n - k + 1) - std::log(2.0 * k - 1) +
                               2.0 * (std::lgamma(k) - std::lgamma(2.0 * k - 1));
  auto terms = log_mode_weights(model);
  for (auto& t : terms) t = -t;
  const double log_lambda = log_prefactor + 2.0 * (k - 1) * std::log(grid.delta_t) - log_sum_exp(terms);
  return std::exp(log_lambda);
}

double lambda_min_two_mode_formula(const FrequencyModel& model, const SamplingGrid& grid) {
  if (model.size() != 2) throw ConfigError("lambda_min two-mode formula: needs K = 2");
  require_modes(model, grid, 2, "lambda_min two-mode formula");
  const double n = grid.n_steps;
  const double gap = model.omegas()[1] - model.omegas()[0];
  const double t = n * grid.delta_t;
  return (n - 1.0 / n) / 12.0 * gap * gap / (1.0 / model.amps()[0] + 1.0 / model.amps()[1]) * t * t;
}

LambdaMinEstimate lambda_min_analytic(const FrequencyModel& model, const SamplingGrid& grid) {
  if (grid.n_steps < model.size()) throw ConfigError("lambda_min_analytic: N < K");
  LambdaMinEstimate out;
  out.short_time_warning = !short_time_regime(model, grid, 0.1);
  if (model.size() == 1) {
    out.value = out.general = grid.n_steps * model.amps()[0];
    return out;
  }
  out.general = lambda_min_general_formula(model, grid);
  if (model.size() == 2) {
    out.two_mode = lambda_min_two_mode_formula(model, grid);
    out.value = *out.two_mode;
  } else {
    out.value = out.general;
  }
  return out;
}

double lambda_min_char_poly_estimate(const FrequencyModel& model, const SamplingGrid& grid) {
  require_modes(model, grid, 2, "lambda_min_char_poly_estimate");
  const auto gram = detail::gram_matrix(model.omegas(), model.amps(), grid.delta_t, grid.n_steps);
  const detail::ExtReal a0 = detail::determinant(gram).real();
  detail::ExtReal minor_sum = 0;
  for (int k = 0; k < model.size(); ++k)
    minor_sum += detail::determinant(detail::principal_minor_matrix(gram, k)).real();
  if (!(a0 > 0) || !(minor_sum > 0))
    throw NumericalError("lambda_min_char_poly_estimate: PP^dagger is singular");
  return static_cast<double>(a0 / minor_sum);
}

double effective_delta(const FrequencyModel& model) {
  const int k = model.size();
  if (k < 2) throw ConfigError("effective_delta: needs K >= 2");
  const auto w = model.omegas();
  const auto d = model.amps();
  if (k == 2) {
    const double gap = std::abs(w[1] - w[0]);
    if (gap == 0.0) throw NumericalError("effective_delta: coincident frequencies");
    return std::sqrt(2.0 * d[0] * d[1]) * gap;
  }
  auto terms = log_mode_weights(model);
  for (auto& t : terms) t = -t;
  // 1/Delta^{2(K-1)} = (sum d / K) * sum_k 1/(d_k prod (w_k - w_j)^2)
  const double log_inv = std::log(model.amp_sum()) - std::log(double(k)) + log_sum_exp(terms);
  return std::exp(-log_inv / (2.0 * (k - 1)));
}

namespace {

void fill_bound(CertaintyBound& b, double lambda) {
  if (!(lambda > 0.0)) throw NumericalError("certainty bound: lambda_min <= 0");
  if (!(b.eta_max >= 0.0)) throw ConfigError("certainty bound: eta_max must be >= 0");
  const auto cond = condition_number(b.lambda_1, lambda, b.trace_s);
  b.kappa = cond.kappa;
  b.kappa_upper = cond.kappa_upper;
  const double k = b.k;
  const double n = b.n_steps;
  // Coefficients first so both bounds are exactly linear in eta_max.
  const double per_step_coeff = b.kappa * k * (n + 1.0) / lambda;
  const double total_coeff = k * n * (n + 1.0) * std::sqrt(b.trace_s) / std::pow(lambda, 1.5);
  b.bound_per_step = per_step_coeff * b.eta_max;
  b.bound_total = total_coeff * b.eta_max;
  b.admissible = b.eta_max < b.lambda_min_exact / (2.0 * n);
}

}  // namespace

CertaintyBound certainty_bound(const FrequencyModel& model, const SamplingGrid& grid, double eta_max,
                               LambdaSource source) {
  if (grid.n_steps < model.size()) throw ConfigError("certainty bound: N < K");
  const auto ev = state_gram_eigenvalues(model, grid);

  CertaintyBound b;
  b.k = model.size();
  b.n_steps = grid.n_steps;
  b.eta_max = eta_max;
  b.lambda_source = source;
  b.lambda_min_exact = ev.back();
  b.lambda_1 = ev.front();
  b.trace_s = grid.n_steps * model.amp_sum();
  b.lambda_min_analytic = lambda_min_analytic(model, grid).value;
  if (model.size() >= 2) {
    b.delta_eff = effective_delta(model);
    b.delta_in_gap_range = *b.delta_eff >= model.min_gap() && *b.delta_eff <= model.max_gap();
  }
  fill_bound(b, source == LambdaSource::kExact ? b.lambda_min_exact : *b.lambda_min_analytic);
  return b;
}

CertaintyBound certainty_bound(const AutocorrSeries& series, int k, double eta_max) {
  const auto spectrum = hermitian_spectrum(build_overlap(series));
  if (k < 1 || k > spectrum.size()) throw ConfigError("certainty bound: rank out of range");
  CertaintyBound b;
  b.k = k;
  b.n_steps = series.n_steps();
  b.eta_max = eta_max;
  b.lambda_min_exact = spectrum.eigenvalues(k - 1);
  b.lambda_1 = spectrum.eigenvalues(0);
  b.trace_s = series.n_steps() * series.at(0).real();
  fill_bound(b, b.lambda_min_exact);
  return b;
}

}  // namespace hinv
