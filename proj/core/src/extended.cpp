#include "detail/extended.hpp"

#include <algorithm>

#include "hinv/error.hpp"

namespace hinv::detail {

ExtMatrix gram_matrix(std::span<const double> omegas, std::span<const double> weights,
                      double delta_t, int n_steps) {
  const auto k = static_cast<Eigen::Index>(omegas.size());
  ExtMatrix g(k, k);
  const ExtReal dt(delta_t);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const ExtReal theta = (ExtReal(omegas[a]) - ExtReal(omegas[b])) * dt;
      ExtReal re = 0, im = 0;
      for (int n = 0; n < n_steps; ++n) {
        const ExtReal phase = theta * n;
        re += cos(phase);
        im -= sin(phase);
      }
      if (!weights.empty()) {
        const ExtReal w = sqrt(ExtReal(weights[a])) * sqrt(ExtReal(weights[b]));
        re *= w;
        im *= w;
      }
      g(a, b) = ExtComplex(re, im);
      g(b, a) = ExtComplex(re, ExtReal(-im));
    }
  }
  return g;
}

std::vector<ExtReal> hermitian_eigenvalues(const ExtMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ExtMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("extended-precision Hermitian eigensolver did not converge");
  std::vector<ExtReal> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::reverse(ev.begin(), ev.end());
  return ev;
}

ExtComplex determinant(const ExtMatrix& m) {
  if (m.rows() == 0) return ExtComplex(ExtReal(1), ExtReal(0));
  return m.partialPivLu().determinant();
}

ExtMatrix principal_minor_matrix(const ExtMatrix& m, int k) {
  const auto n = m.rows();
  ExtMatrix out(n - 1, n - 1);
  for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
    if (i == k) continue;
    for (Eigen::Index j = 0, oj = 0; j < n; ++j) {
      if (j == k) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

}  // namespace hinv::detail
