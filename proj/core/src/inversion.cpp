#include "hinv/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hinv/error.hpp"

namespace hinv {

void InversionConfig::validate() const {
  if (!(eta_max >= 0.0)) throw ConfigError("inversion: eta_max must be >= 0");
  if (forced_rank && rank_threshold)
    throw ConfigError("inversion: forced_rank and rank_threshold are mutually exclusive");
  if (forced_rank && *forced_rank < 1) throw ConfigError("inversion: forced_rank must be >= 1");
  if (rank_threshold && !(*rank_threshold >= 0.0))
    throw ConfigError("inversion: rank_threshold must be >= 0");
}

int detect_rank(const SpectralData& spectrum, double eta_max, int n_steps,
                std::optional<double> threshold) {
  double tau;
  if (threshold) {
    tau = *threshold;
  } else if (eta_max > 0.0) {
    tau = n_steps * eta_max;
  } else {
    tau = 1e-10 * spectrum.eigenvalues.sum();
  }
  const auto count = static_cast<int>(
      std::count_if(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
                    [tau](double lambda) { return lambda > tau; }));
  if (count == 0) throw NumericalError("no eigenvalue above the rank threshold");
  if (count == spectrum.size())
    throw NumericalError("no spectral gap: every eigenvalue is above the rank threshold");
  return count;
}

Subspace truncate_subspace(const SpectralData& spectrum, int k_hat) {
  if (k_hat < 1 || k_hat > spectrum.size())
    throw ConfigError("truncate_subspace: rank " + std::to_string(k_hat) + " out of range");
  if (!(spectrum.eigenvalues(k_hat - 1) > 0.0))
    throw NumericalError("truncate_subspace: non-positive eigenvalue among the retained ones");
  return {spectrum.eigenvectors.leftCols(k_hat), spectrum.eigenvalues.head(k_hat)};
}

std::vector<Complex> solve_reduced_eigenproblem(const ShiftedMatrix& shifted, const Subspace& sub) {
  const auto& q = sub.basis;
  if (shifted.entries.rows() != q.rows() || shifted.entries.cols() != q.rows())
    throw ConfigError("solve_reduced_eigenproblem: shape mismatch between U' and Q");
  const Eigen::MatrixXcd reduced =
      sub.eigenvalues.cwiseInverse().cast<Complex>().asDiagonal() * (q.adjoint() * shifted.entries * q);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(reduced, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("solve_reduced_eigenproblem: eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.begin(), ev.end()};
}

namespace {

// Phase in (-pi, pi].
double principal_arg(Complex z) {
  const double a = std::arg(z);
  return a == -std::numbers::pi ? std::numbers::pi : a;
}

}  // namespace

std::vector<double> extract_frequencies(std::span<const Complex> mus, double delta_t) {
  if (!(delta_t > 0.0)) throw ConfigError("extract_frequencies: delta_t must be > 0");
  std::vector<double> out;
  out.reserve(mus.size());
  for (auto mu : mus) out.push_back(-principal_arg(mu) / delta_t);
  std::sort(out.begin(), out.end());
  return out;
}

AmplitudeFit recover_amplitudes(const AutocorrSeries& series, std::span<const double> omegas) {
  const int k = static_cast<int>(omegas.size());
  if (k == 0) throw ConfigError("recover_amplitudes: no frequencies");
  std::vector<double> sorted(omegas.begin(), omegas.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw NumericalError("recover_amplitudes: duplicate frequencies make the design rank-deficient");

  const int rows = series.grid().sample_count();
  const double dt = series.grid().delta_t;
  Eigen::MatrixXcd design(rows, k);
  Eigen::VectorXcd rhs(rows);
  for (int n = 0; n < rows; ++n) {
    rhs(n) = series.values()[n];
    for (int j = 0; j < k; ++j) design(n, j) = std::polar(1.0, -omegas[j] * n * dt);
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(design);
  if (qr.rank() < k)
    throw NumericalError("recover_amplitudes: near-coincident frequencies make the design rank-deficient");
  const Eigen::VectorXcd solution = qr.solve(rhs);

  AmplitudeFit fit;
  fit.amps.resize(k);
  for (int j = 0; j < k; ++j) {
    double d = solution(j).real();
    if (d < 0.0) {
      d = 0.0;
      fit.clamped = true;
    }
    fit.amps[j] = d;
  }
  const Eigen::VectorXcd model = design * Eigen::Map<const Eigen::VectorXd>(fit.amps.data(), k).cast<Complex>();
  fit.residual = std::sqrt((rhs - model).squaredNorm() / rows);
  return fit;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

InversionResult harmonic_invert(const AutocorrSeries& series, const InversionConfig& config) {
  config.validate();
  const int n = series.n_steps();

  const auto overlap = build_overlap(series);
  const auto shifted = build_shifted(series);
  const auto spectrum = stage("spectrum", [&] { return hermitian_spectrum(overlap); });

  const int k_hat = config.forced_rank ? *config.forced_rank : stage("rank detection", [&] {
    return detect_rank(spectrum, config.eta_max, n, config.rank_threshold);
  });
  if (k_hat > n) throw ConfigError("rank detection: forced rank exceeds N");

  const auto sub = stage("truncation", [&] { return truncate_subspace(spectrum, k_hat); });
  const auto mus = stage("reduced eigenproblem", [&] { return solve_reduced_eigenproblem(shifted, sub); });

  // Keep |mu| paired with its frequency through the sort.
  const double dt = series.grid().delta_t;
  std::vector<std::size_t> order(mus.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> raw(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) raw[i] = -principal_arg(mus[i]) / dt;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

  InversionResult result;
  result.detected_rank = k_hat;
  for (auto i : order) {
    result.omegas.push_back(raw[i]);
    result.eigen_moduli.push_back(std::abs(mus[i]));
  }
  const auto fit = stage("amplitudes", [&] { return recover_amplitudes(series, result.omegas); });
  result.amps = fit.amps;
  result.amps_clamped = fit.clamped;
  result.residual = fit.residual;
  return result;
}

}  // namespace hinv
