#include <doctest.h>

#include <cmath>
#include <random>

#include "hinv/certainty.hpp"
#include "hinv/inversion.hpp"
#include "hinv/matrix_kit.hpp"

using namespace hinv;

namespace {

FrequencyModel random_model(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> jitter(0.0, 0.6), amp(0.1, 1.0);
  std::vector<double> w, d;
  for (int j = 0; j < k; ++j) {
    w.push_back(-2.0 + j * 1.0 + jitter(rng));
    d.push_back(amp(rng));
  }
  return FrequencyModel(w, d);
}

}  // namespace

TEST_CASE("noiseless inversion recovers random well-separated models") {
  std::mt19937_64 rng(101);
  for (int k = 1; k <= 5; ++k) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto m = random_model(rng, k);
      const SamplingGrid g(0.1, 2 * k + 4);
      const auto r = harmonic_invert(synthesize_autocorrelation(m, g), InversionConfig{});
      REQUIRE(r.detected_rank == k);
      for (int j = 0; j < k; ++j) {
        CHECK(r.omegas[j] == doctest::Approx(m.omegas()[j]).epsilon(1e-7));
        CHECK(std::abs(r.amps[j] - m.amps()[j]) < 1e-7);
      }
    }
  }
}

TEST_CASE("mode order in the input does not matter") {
  const FrequencyModel a({0.3, 1.2, 2.8}, {0.2, 0.5, 0.3});
  const FrequencyModel b({2.8, 0.3, 1.2}, {0.3, 0.2, 0.5});
  const SamplingGrid g(0.1, 10);
  const auto sa = synthesize_autocorrelation(a, g);
  const auto sb = synthesize_autocorrelation(b, g);
  for (int n = 0; n <= 10; ++n) CHECK(std::abs(sa.values()[n] - sb.values()[n]) < 1e-15);
  const auto ra = harmonic_invert(sa, InversionConfig{});
  const auto rb = harmonic_invert(sb, InversionConfig{});
  for (int k = 0; k < 3; ++k) CHECK(ra.omegas[k] == doctest::Approx(rb.omegas[k]).epsilon(1e-12));
}

TEST_CASE("a common frequency shift moves every recovered frequency") {
  const double shift = 0.75;
  const FrequencyModel a({0.3, 1.2, 2.8}, {0.2, 0.5, 0.3});
  const FrequencyModel b({0.3 + shift, 1.2 + shift, 2.8 + shift}, {0.2, 0.5, 0.3});
  const SamplingGrid g(0.1, 10);
  const auto ra = harmonic_invert(synthesize_autocorrelation(a, g), InversionConfig{});
  const auto rb = harmonic_invert(synthesize_autocorrelation(b, g), InversionConfig{});
  for (int k = 0; k < 3; ++k) {
    CHECK(rb.omegas[k] - ra.omegas[k] == doctest::Approx(shift).epsilon(1e-9));
    CHECK(rb.amps[k] == doctest::Approx(ra.amps[k]).epsilon(1e-9));
  }
  // The spectrum of S is shift invariant.
  const auto ga = state_gram_eigenvalues(a, g);
  const auto gb = state_gram_eigenvalues(b, g);
  for (int k = 0; k < 3; ++k) CHECK(gb[k] == doctest::Approx(ga[k]).epsilon(1e-13));
}

TEST_CASE("S and P P^dagger share their nonzero spectrum") {
  std::mt19937_64 rng(7);
  for (int k = 2; k <= 4; ++k) {
    const auto m = random_model(rng, k);
    const SamplingGrid g(0.2, 9);
    const auto s = hermitian_spectrum(build_overlap(synthesize_autocorrelation(m, g)));
    const auto gram = state_gram_eigenvalues(m, g);
    for (int j = 0; j < k; ++j) CHECK(s.eigenvalues(j) == doctest::Approx(gram[j]).epsilon(1e-10));
    for (int j = k; j < 9; ++j) CHECK(std::abs(s.eigenvalues(j)) < 1e-12);
  }
}

TEST_CASE("the bound grows with eta and shrinks as modes separate") {
  const SamplingGrid g(1e-3, 10);
  const FrequencyModel close({0.0, 1.0}, {0.5, 0.5});
  const FrequencyModel far({0.0, 3.0}, {0.5, 0.5});
  double prev = 0.0;
  for (double eta : {1e-10, 1e-9, 1e-8, 1e-7}) {
    const double b = certainty_bound(close, g, eta).bound_total;
    CHECK(b > prev);
    prev = b;
  }
  CHECK(certainty_bound(far, g, 1e-8).bound_total < certainty_bound(close, g, 1e-8).bound_total);
  CHECK(certainty_bound(close, SamplingGrid(2e-3, 10), 1e-8).bound_total <
        certainty_bound(close, g, 1e-8).bound_total);
}

TEST_CASE("analytic lambda_min tracks the exact value deep in the short-time regime") {
  std::mt19937_64 rng(19);
  for (int k = 2; k <= 4; ++k) {
    const auto m = random_model(rng, k);
    const SamplingGrid g(0.01 / (m.max_gap() * 10), 10);
    const double exact = state_gram_eigenvalues(m, g).back();
    const double est = lambda_min_analytic(m, g).value;
    CHECK(std::abs(est / exact - 1.0) < 0.01);
    CHECK(exact <= g.n_steps * m.amp_sum());
  }
}
