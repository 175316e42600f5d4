#pragma once

// Reference computations used by the unit tests. Written without touching the
// library internals: plain loops in long double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace oracle {

using LD = long double;
using CLD = std::complex<LD>;

inline CLD autocorr(const std::vector<double>& w, const std::vector<double>& d, double dt, int n) {
  CLD c = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const LD phase = -static_cast<LD>(w[k]) * n * static_cast<LD>(dt);
    c += static_cast<LD>(d[k]) * CLD(std::cos(phase), std::sin(phase));
  }
  return c;
}

// S = P^dagger P with P_kn = sqrt(d_k) exp(-i w_k n dt), n = 0..N-1.
inline std::vector<std::vector<CLD>> overlap_from_states(const std::vector<double>& w, const std::vector<double>& d,
                                                         double dt, int n_steps) {
  const std::size_t k = w.size();
  std::vector<std::vector<CLD>> p(k, std::vector<CLD>(n_steps));
  for (std::size_t a = 0; a < k; ++a)
    for (int n = 0; n < n_steps; ++n) {
      const LD phase = -static_cast<LD>(w[a]) * n * static_cast<LD>(dt);
      p[a][n] = std::sqrt(static_cast<LD>(d[a])) * CLD(std::cos(phase), std::sin(phase));
    }
  std::vector<std::vector<CLD>> s(n_steps, std::vector<CLD>(n_steps));
  for (int m = 0; m < n_steps; ++m)
    for (int n = 0; n < n_steps; ++n)
      for (std::size_t a = 0; a < k; ++a) s[m][n] += std::conj(p[a][m]) * p[a][n];
  return s;
}

// Eigenvalues of a Hermitian matrix via cyclic Jacobi on the real symmetric
// embedding [[A, -B], [B, A]]; every eigenvalue appears twice there.
inline std::vector<LD> hermitian_eigenvalues(const std::vector<std::vector<CLD>>& h) {
  const std::size_t n = h.size(), m = 2 * n;
  std::vector<std::vector<LD>> a(m, std::vector<LD>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = a[i + n][j + n] = h[i][j].real();
      a[i + n][j] = h[i][j].imag();
      a[i][j + n] = -h[i][j].imag();
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    LD off = 0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-60L) break;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        if (std::abs(a[p][q]) < 1e-300L) continue;
        const LD theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const LD t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const LD c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t r = 0; r < m; ++r) {
          const LD arp = a[r][p], arq = a[r][q];
          a[r][p] = c * arp - s * arq;
          a[r][q] = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < m; ++r) {
          const LD apr = a[p][r], aqr = a[q][r];
          a[p][r] = c * apr - s * aqr;
          a[q][r] = s * apr + c * aqr;
        }
      }
  }
  std::vector<LD> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = a[i][i];
  std::sort(diag.begin(), diag.end(), std::greater<>());
  std::vector<LD> out;
  for (std::size_t i = 0; i < m; i += 2) out.push_back((diag[i] + diag[i + 1]) / 2);
  return out;
}

// det(V V^dagger) for two unit-weight modes: N^2 - |sum_n exp(-i dw n dt)|^2.
inline LD two_mode_gram_det(double dw, double dt, int n_steps) {
  CLD sum = 0;
  for (int n = 0; n < n_steps; ++n) {
    const LD phase = -static_cast<LD>(dw) * n * static_cast<LD>(dt);
    sum += CLD(std::cos(phase), std::sin(phase));
  }
  return static_cast<LD>(n_steps) * n_steps - std::norm(sum);
}

// Delta from 1/Delta^{2(K-1)} = (sum d / K) sum_k 1 / (d_k prod_{j != k} (w_k - w_j)^2).
inline LD effective_delta(const std::vector<double>& w, const std::vector<double>& d) {
  const std::size_t k = w.size();
  LD total = 0, dsum = 0;
  for (std::size_t a = 0; a < k; ++a) {
    dsum += d[a];
    LD prod = d[a];
    for (std::size_t b = 0; b < k; ++b)
      if (b != a) prod *= (static_cast<LD>(w[a]) - w[b]) * (static_cast<LD>(w[a]) - w[b]);
    total += 1 / prod;
  }
  const LD inv = dsum / k * total;
  return std::pow(inv, -1.0L / (2 * (k - 1)));
}

// General-K short-time lambda_min with plain factorials.
inline LD lambda_min_general(const std::vector<double>& w, const std::vector<double>& d, double dt, int n_steps) {
  const int k = static_cast<int>(w.size());
  auto fact = [](int n) { LD f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
  const LD pre = fact(n_steps + k - 1) / (fact(n_steps - k) * (2 * k - 1)) *
                 std::pow(fact(k - 1) / fact(2 * k - 2), 2) * std::pow(static_cast<LD>(dt), 2 * (k - 1));
  LD denom = 0;
  for (int a = 0; a < k; ++a) {
    LD prod = d[a];
    for (int b = 0; b < k; ++b)
      if (b != a) prod *= (static_cast<LD>(w[a]) - w[b]) * (static_cast<LD>(w[a]) - w[b]);
    denom += 1 / prod;
  }
  return pre / denom;
}

}  // namespace oracle
