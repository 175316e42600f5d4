#include "hinv/matrix_kit.hpp"

#include <cmath>
#include <ostream>
#include <iomanip>

#include "detail/extended.hpp"
#include "hinv/error.hpp"

namespace hinv {

OverlapMatrix build_overlap(const AutocorrSeries& series) {
  const int n = series.n_steps();
  Eigen::MatrixXcd s(n, n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) s(row, col) = series.at(col - row);
  // A noisy c_0 may carry an imaginary part; the diagonal must stay real.
  s.diagonal().setConstant(Complex(series.at(0).real(), 0.0));
  return {std::move(s)};
}

ShiftedMatrix build_shifted(const AutocorrSeries& series) {
  const int n = series.n_steps();
  Eigen::MatrixXcd u(n, n);
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) u(row, col) = series.at(col - row + 1);
  return {std::move(u)};
}

StateMatrix build_state_matrix(const FrequencyModel& model, const SamplingGrid& grid) {
  const int k = model.size();
  const int n = grid.n_steps;
  StateMatrix out;
  out.sqrt_amps.resize(k);
  out.vandermonde.resize(k, n);
  for (int row = 0; row < k; ++row) {
    out.sqrt_amps(row) = std::sqrt(model.amps()[row]);
    for (int col = 0; col < n; ++col)
      out.vandermonde(row, col) = std::polar(1.0, -model.omegas()[row] * col * grid.delta_t);
  }
  out.entries = out.sqrt_amps.cast<Complex>().asDiagonal() * out.vandermonde;
  return out;
}

SpectralData hermitian_spectrum(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0)
    throw ConfigError("hermitian_spectrum: expected a non-empty square matrix");
  const double scale = hermitian.norm();
  if ((hermitian - hermitian.adjoint()).norm() > 1e-12 * std::max(scale, 1.0))
    throw ConfigError("hermitian_spectrum: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw NumericalError("hermitian_spectrum: eigensolver did not converge");

  const auto n = hermitian.rows();
  SpectralData out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    auto col = out.eigenvectors.col(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-10) {
        col *= std::conj(col(i)) / mag;
        col(i) = Complex(mag, 0.0);
        break;
      }
    }
  }
  return out;
}

double vandermonde_gram_det_exact(std::span<const double> omegas, const SamplingGrid& grid) {
  if (omegas.empty()) throw ConfigError("vandermonde_gram_det_exact: no frequencies");
  if (grid.n_steps < static_cast<int>(omegas.size()))
    throw ConfigError("vandermonde_gram_det_exact: N < K");
  const auto gram = detail::gram_matrix(omegas, {}, grid.delta_t, grid.n_steps);
  const auto det = detail::determinant(gram);
  const double re = static_cast<double>(det.real());
  const double im = static_cast<double>(det.imag());
  if (std::abs(im) > 1e-10 * std::abs(re) && std::abs(im) > 1e-300)
    throw NumericalError("vandermonde_gram_det_exact: determinant has a non-negligible imaginary part");
  return re;
}

double log_vandermonde_gram_det_approx(std::span<const double> omegas, const SamplingGrid& grid) {
  const int k = static_cast<int>(omegas.size());
  const double n = grid.n_steps;
  if (k == 0) throw ConfigError("vandermonde_gram_det_approx: no frequencies");
  if (grid.n_steps < k) throw ConfigError("vandermonde_gram_det_approx: N < K");
  if (k == 1) return std::log(n);

  double log_det = k * std::log(n / k);
  for (int j = 1; j < k; ++j)
    log_det += (k - j) * (std::log(n * n - double(j) * j) - std::log(double(k) * k - double(j) * j));
  log_det += k * (k - 1) * std::log(grid.delta_t);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) log_det += 2.0 * std::log(std::abs(omegas[j] - omegas[i]));
  return log_det;
}

double vandermonde_gram_det_approx(std::span<const double> omegas, const SamplingGrid& grid) {
  return std::exp(log_vandermonde_gram_det_approx(omegas, grid));
}

std::vector<double> state_gram_eigenvalues(const FrequencyModel& model, const SamplingGrid& grid) {
  if (grid.n_steps < model.size()) throw ConfigError("state_gram_eigenvalues: N < K");
  const auto gram = detail::gram_matrix(model.omegas(), model.amps(), grid.delta_t, grid.n_steps);
  const auto ev = detail::hermitian_eigenvalues(gram);
  std::vector<double> out;
  out.reserve(ev.size());
  for (const auto& v : ev) out.push_back(static_cast<double>(v));
  return out;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
  const auto old_precision = os.precision(17);
  os << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << r << ',' << c << ',' << m(r, c).real() << ',' << m(r, c).imag() << '\n';
  os.precision(old_precision);
}

}  // namespace hinv
