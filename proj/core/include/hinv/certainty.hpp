#pragma once

#include <optional>

#include "hinv/matrix_kit.hpp"
#include "hinv/signal_model.hpp"

namespace hinv {

struct ConditionNumber {
  double kappa = 1.0;        // sqrt(lambda_1 / lambda_min)
  double kappa_upper = 1.0;  // sqrt(Tr(S) / lambda_min)
};

ConditionNumber condition_number(double lambda_1, double lambda_min, double trace);
// K positive eigenvalues taken from the top of `spectrum`.
ConditionNumber condition_number(const SpectralData& spectrum, int k);
ConditionNumber condition_number(const FrequencyModel& model, const SamplingGrid& grid);

struct LambdaMinEstimate {
  double value = 0.0;                  // K-appropriate estimate
  double general = 0.0;                // general-K closed form (== value for K > 2)
  std::optional<double> two_mode;      // dedicated K = 2 form
  bool short_time_warning = false;     // T * max_gap > 0.1
};

// Short-time closed form for the smallest positive eigenvalue of S. K = 1
// returns Tr(S) = N d_1.
LambdaMinEstimate lambda_min_analytic(const FrequencyModel& model, const SamplingGrid& grid);

// The two closed forms on their own. The general one is evaluated in log space.
double lambda_min_general_formula(const FrequencyModel& model, const SamplingGrid& grid);
double lambda_min_two_mode_formula(const FrequencyModel& model, const SamplingGrid& grid);

// -a0/a1 of the characteristic polynomial: det(PP^dagger) / sum_k Minor_kk(PP^dagger).
double lambda_min_char_poly_estimate(const FrequencyModel& model, const SamplingGrid& grid);

// Effective frequency distance. Requires K >= 2.
double effective_delta(const FrequencyModel& model);

enum class LambdaSource { kExact, kAnalytic };

struct CertaintyBound {
  int k = 0;
  int n_steps = 0;
  double lambda_min_exact = 0.0;
  std::optional<double> lambda_min_analytic;
  double lambda_1 = 0.0;
  double trace_s = 0.0;
  double kappa = 0.0;
  double kappa_upper = 0.0;
  std::optional<double> delta_eff;
  std::optional<bool> delta_in_gap_range;
  double bound_per_step = 0.0;  // bounds |w~ - w| dt
  double bound_total = 0.0;     // bounds |w~ - w| T
  double eta_max = 0.0;
  bool admissible = false;      // eta_max < lambda_min_exact / (2N)
  LambdaSource lambda_source = LambdaSource::kExact;
};

CertaintyBound certainty_bound(const FrequencyModel& model, const SamplingGrid& grid, double eta_max,
                               LambdaSource source = LambdaSource::kExact);

// From measured data: lambdas come from the N x N spectrum of S built from
// `series`, with k the number of modes (usually the detected rank).
CertaintyBound certainty_bound(const AutocorrSeries& series, int k, double eta_max);

}  // namespace hinv
