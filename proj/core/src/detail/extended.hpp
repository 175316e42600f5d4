#pragma once

// 50-digit real/complex scalars usable as Eigen matrix elements. Used for the
// K x K Gram-side quantities, whose smallest eigenvalue sits far below the
// double-precision rounding floor of Tr(S) in the short-time regime.

#include <complex>
#include <limits>
#include <span>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hinv::detail {
using ExtReal = boost::multiprecision::cpp_bin_float_50;
using ExtComplex = std::complex<ExtReal>;
using ExtMatrix = Eigen::Matrix<ExtComplex, Eigen::Dynamic, Eigen::Dynamic>;
}  // namespace hinv::detail

namespace Eigen {
template <>
struct NumTraits<hinv::detail::ExtReal> : GenericNumTraits<hinv::detail::ExtReal> {
  using Self = hinv::detail::ExtReal;
  using Real = Self;
  using NonInteger = Self;
  using Nested = Self;
  using Literal = Self;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 20,
    MulCost = 40
  };
  static Real epsilon() { return std::numeric_limits<Self>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return (std::numeric_limits<Self>::max)(); }
  static Real lowest() { return (std::numeric_limits<Self>::lowest)(); }
  static int digits10() { return std::numeric_limits<Self>::digits10; }
  static Real infinity() { return std::numeric_limits<Self>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Self>::quiet_NaN(); }
};
}  // namespace Eigen

namespace hinv::detail {

// G_jk = w_j w_k sum_{n=0}^{N-1} exp(-i (omega_j - omega_k) n dt).
// `weights` empty means unit weights (the bare Vandermonde Gram VV^dagger).
ExtMatrix gram_matrix(std::span<const double> omegas, std::span<const double> weights,
                      double delta_t, int n_steps);

// Eigenvalues of a Hermitian extended-precision matrix, descending.
std::vector<ExtReal> hermitian_eigenvalues(const ExtMatrix& m);

ExtComplex determinant(const ExtMatrix& m);

// Copy of `m` without row and column k.
ExtMatrix principal_minor_matrix(const ExtMatrix& m, int k);

}  // namespace hinv::detail
