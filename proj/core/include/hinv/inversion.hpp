#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hinv/matrix_kit.hpp"
#include "hinv/signal_model.hpp"

namespace hinv {

struct InversionConfig {
  double eta_max = 0.0;                  // assumed noise ceiling
  std::optional<int> forced_rank;        // skip detection
  std::optional<double> rank_threshold;  // replaces N * eta_max

  void validate() const;
};

struct InversionResult {
  int detected_rank = 0;
  std::vector<double> omegas;        // ascending, rad/time
  std::vector<double> amps;          // paired with omegas
  std::vector<double> eigen_moduli;  // |mu_k|, paired with omegas
  double residual = 0.0;             // RMS model misfit over n = 0..N
  bool amps_clamped = false;         // some least-squares amplitude was negative
};

/// Dominant eigen-subspace of S: Q (N x k, orthonormal columns) and D's diagonal.
struct Subspace {
  Eigen::MatrixXcd basis;
  Eigen::VectorXd eigenvalues;
};

struct AmplitudeFit {
  std::vector<double> amps;
  bool clamped = false;
  double residual = 0.0;
};

// Number of eigenvalues strictly above tau. tau = threshold if given, else
// N * eta_max, else (eta_max == 0) 1e-10 * Tr(S). Throws NumericalError when
// the count is 0 or N.
int detect_rank(const SpectralData& spectrum, double eta_max, int n_steps,
                std::optional<double> threshold = std::nullopt);

Subspace truncate_subspace(const SpectralData& spectrum, int k_hat);

// Eigenvalues of D^{-1} Q^dagger U' Q, unordered.
std::vector<Complex> solve_reduced_eigenproblem(const ShiftedMatrix& shifted, const Subspace& sub);

// omega = -arg(mu) / dt with arg in (-pi, pi]; ascending.
std::vector<double> extract_frequencies(std::span<const Complex> mus, double delta_t);

// Least squares c_n ~ sum_k d_k exp(-i omega_k n dt) over n = 0..N.
AmplitudeFit recover_amplitudes(const AutocorrSeries& series, std::span<const double> omegas);

// Full pipeline. Errors are rethrown with the failing stage prefixed.
InversionResult harmonic_invert(const AutocorrSeries& series, const InversionConfig& config);

}  // namespace hinv
