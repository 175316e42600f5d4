#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hinv/signal_model.hpp"

namespace hinv {

/// N x N Hermitian Toeplitz overlap matrix, S_mn = c_{n-m}.
struct OverlapMatrix {
  Eigen::MatrixXcd entries;
};

/// N x N Toeplitz shifted matrix, U'_mn = c_{n-m+1}.
struct ShiftedMatrix {
  Eigen::MatrixXcd entries;
};

/// K x N state matrix P_kn = sqrt(d_k) exp(-i omega_k n dt), n = 0..N-1,
/// kept together with its factors P = diag(sqrt_amps) * vandermonde.
struct StateMatrix {
  Eigen::MatrixXcd entries;
  Eigen::VectorXd sqrt_amps;
  Eigen::MatrixXcd vandermonde;
};

/// Eigenpairs of a Hermitian matrix. Eigenvalues descending; each eigenvector
/// column is scaled so its first non-negligible component is real positive.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

OverlapMatrix build_overlap(const AutocorrSeries& series);
ShiftedMatrix build_shifted(const AutocorrSeries& series);
StateMatrix build_state_matrix(const FrequencyModel& model, const SamplingGrid& grid);

// Throws NumericalError when the eigensolver does not converge.
SpectralData hermitian_spectrum(const Eigen::MatrixXcd& hermitian);
inline SpectralData hermitian_spectrum(const OverlapMatrix& s) { return hermitian_spectrum(s.entries); }

// det(V V^dagger) from the explicit K x K Gram matrix, evaluated in extended
// precision. Frequencies are assumed distinct (coincident ones give 0).
double vandermonde_gram_det_exact(std::span<const double> omegas, const SamplingGrid& grid);

// Short-time approximation
//   (N/K)^K prod_{j<K} ((N^2-j^2)/(K^2-j^2))^{K-j} dt^{K(K-1)} prod_{i<j} (w_j-w_i)^2
// and its natural logarithm. K = 1 gives N.
double vandermonde_gram_det_approx(std::span<const double> omegas, const SamplingGrid& grid);
double log_vandermonde_gram_det_approx(std::span<const double> omegas, const SamplingGrid& grid);

// Nonzero spectrum of S = P^dagger P via the K x K matrix P P^dagger, computed
// in extended precision and rounded to double. Descending.
std::vector<double> state_gram_eigenvalues(const FrequencyModel& model, const SamplingGrid& grid);

// Debug dump with header `row,col,re,im`.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m);

}  // namespace hinv
