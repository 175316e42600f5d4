#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hinv/certainty.hpp"
#include "hinv/error.hpp"
#include "hinv/matrix_kit.hpp"
#include "oracles.hpp"

using namespace hinv;

namespace {

const FrequencyModel kTwo({0.0, 1.0}, {0.5, 0.5});
const SamplingGrid kGrid(1e-3, 10);

// 60-digit reference values for kTwo on kGrid.
constexpr double kLambdaMin = 2.0624974820326941935e-5;
constexpr double kLambda1 = 9.9999793750251796731;
constexpr double kKappa = 696.31033079228395448;
constexpr double kBoundTotal = 742.73269220569147997;  // eta = 1e-7
constexpr double kBoundPerStep = 74.273192626314279232;
constexpr double kCharPoly = 2.0624932281368308023e-5;

}  // namespace

TEST_CASE("condition number of a single mode is 1") {
  const auto c = condition_number(FrequencyModel({0.4}, {0.9}), SamplingGrid(0.1, 5));
  CHECK(c.kappa == doctest::Approx(1.0));
  CHECK(c.kappa_upper == doctest::Approx(1.0));
}

TEST_CASE("orthogonal rows give kappa = 1") {
  const int n = 8;
  const double dt = 0.1;
  const FrequencyModel m({0.0, 2.0 * std::numbers::pi / (n * dt)}, {0.5, 0.5});
  const auto c = condition_number(m, SamplingGrid(dt, n));
  CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c.kappa_upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("short-time kappa from the exact spectrum") {
  const auto c = condition_number(kTwo, kGrid);
  CHECK(c.kappa == doctest::Approx(kKappa).epsilon(1e-13));
  CHECK(c.kappa == doctest::Approx(std::sqrt(kLambda1 / kLambdaMin)).epsilon(1e-13));
  const auto spec = hermitian_spectrum(build_overlap(synthesize_autocorrelation(kTwo, kGrid)));
  CHECK(condition_number(spec, 2).kappa == doctest::Approx(kKappa).epsilon(1e-8));
  CHECK(condition_number(kLambda1, kLambdaMin, 10.0).kappa_upper == doctest::Approx(std::sqrt(10.0 / kLambdaMin)));
}

TEST_CASE("analytic lambda_min, two modes") {
  const auto est = lambda_min_analytic(kTwo, kGrid);
  // (9.9 / 12) * 0.25 * 1e-4
  CHECK(est.value == doctest::Approx(2.0625e-5).epsilon(1e-13));
  REQUIRE(est.two_mode);
  CHECK(*est.two_mode == doctest::Approx(2.0625e-5).epsilon(1e-13));
  CHECK(est.general == doctest::Approx(2.0625e-5).epsilon(1e-12));
  CHECK_FALSE(est.short_time_warning);
  CHECK(lambda_min_analytic(kTwo, SamplingGrid(0.1, 10)).short_time_warning);

  // Ratio to the exact value tends to 1 as dt shrinks.
  double prev = 1.0;
  for (double dt : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const SamplingGrid g(dt, 10);
    const double dev = std::abs(lambda_min_analytic(kTwo, g).value / state_gram_eigenvalues(kTwo, g).back() - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("general formula reduces to the two-mode formula") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> w(-3.0, 3.0), d(0.05, 2.0), dt(1e-4, 1e-1);
  for (int n = 3; n <= 20; ++n) {
    for (int i = 0; i < 10; ++i) {
      const FrequencyModel m({w(rng), w(rng)}, {d(rng), d(rng)});
      const SamplingGrid g(dt(rng), n);
      const double a = lambda_min_general_formula(m, g);
      const double b = lambda_min_two_mode_formula(m, g);
      CHECK(std::abs(a / b - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("general formula against the factorial oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.0, 3.0), d(0.1, 1.0);
  for (int k = 2; k <= 5; ++k) {
    for (int n : {k, k + 1, 12}) {
      std::vector<double> ws, ds;
      for (int j = 0; j < k; ++j) {
        ws.push_back(w(rng) + 3.0 * j);
        ds.push_back(d(rng));
      }
      const double got = lambda_min_general_formula(FrequencyModel(ws, ds), SamplingGrid(1e-2, n));
      const double want = double(oracle::lambda_min_general(ws, ds, 1e-2, n));
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("analytic lambda_min is linear in the amplitudes") {
  const FrequencyModel a({0.0, 0.4, 1.5}, {0.2, 0.3, 0.5});
  const FrequencyModel b({0.0, 0.4, 1.5}, {0.4, 0.6, 1.0});
  const SamplingGrid g(1e-3, 9);
  CHECK(lambda_min_analytic(b, g).value == doctest::Approx(2.0 * lambda_min_analytic(a, g).value).epsilon(1e-13));
}

TEST_CASE("analytic lambda_min for one mode is N d_1") {
  CHECK(lambda_min_analytic(FrequencyModel({1.0}, {0.3}), SamplingGrid(0.1, 7)).value == doctest::Approx(2.1));
}

TEST_CASE("characteristic polynomial estimate") {
  CHECK(lambda_min_char_poly_estimate(kTwo, kGrid) == doctest::Approx(kCharPoly).epsilon(1e-12));
  // K = 2: lambda_1 lambda_2 / (lambda_1 + lambda_2).
  const auto ev = state_gram_eigenvalues(kTwo, SamplingGrid(0.05, 6));
  CHECK(lambda_min_char_poly_estimate(kTwo, SamplingGrid(0.05, 6)) ==
        doctest::Approx(ev[0] * ev[1] / (ev[0] + ev[1])).epsilon(1e-12));

  const FrequencyModel three({0.0, 1.0, 2.5}, {0.3, 0.3, 0.4});
  const SamplingGrid g(0.05 / (2.5 * 9), 9);
  const double exact = state_gram_eigenvalues(three, g).back();
  CHECK(std::abs(lambda_min_char_poly_estimate(three, g) / exact - 1.0) < 0.05);
}

TEST_CASE("effective delta") {
  CHECK(effective_delta(kTwo) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const FrequencyModel three({0.0, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(effective_delta(three) == doctest::Approx(0.90360200360984483196).epsilon(1e-14));
  CHECK(effective_delta(three) == doctest::Approx(double(oracle::effective_delta({0.0, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}))).epsilon(1e-14));

  const std::vector<double> w{0.1, 0.5, 1.7, 2.0}, d{0.1, 0.2, 0.3, 0.4};
  const FrequencyModel four(w, d);
  CHECK(effective_delta(four) == doctest::Approx(double(oracle::effective_delta(w, d))).epsilon(1e-13));

  std::vector<double> ws;
  for (double x : w) ws.push_back(3.0 * x);
  CHECK(effective_delta(FrequencyModel(ws, d)) == doctest::Approx(3.0 * effective_delta(four)).epsilon(1e-13));
  CHECK_THROWS_AS(effective_delta(FrequencyModel({1.0}, {1.0})), ConfigError);
}

TEST_CASE("certainty bound for the reference scenario") {
  const auto b = certainty_bound(kTwo, kGrid, 1e-7);
  CHECK(b.k == 2);
  CHECK(b.lambda_min_exact == doctest::Approx(kLambdaMin).epsilon(1e-14));
  CHECK(b.lambda_1 == doctest::Approx(kLambda1).epsilon(1e-14));
  CHECK(b.trace_s == 10.0);
  CHECK(b.kappa == doctest::Approx(kKappa).epsilon(1e-13));
  CHECK(b.bound_total == doctest::Approx(kBoundTotal).epsilon(1e-13));
  CHECK(b.bound_per_step == doctest::Approx(kBoundPerStep).epsilon(1e-13));
  CHECK(b.admissible);
  REQUIRE(b.delta_eff);
  CHECK(*b.delta_eff == doctest::Approx(1.0 / std::sqrt(2.0)));
  REQUIRE(b.lambda_min_analytic);
  CHECK(*b.lambda_min_analytic == doctest::Approx(2.0625e-5));

  // Hand form: 2 * 10 * 11 * sqrt(10) / lambda^1.5 * eta.
  CHECK(b.bound_total == doctest::Approx(220.0 * std::sqrt(10.0) / std::pow(kLambdaMin, 1.5) * 1e-7).epsilon(1e-13));
  // With kappa_upper the per-step form times N is the total form.
  const double per_step_upper = b.kappa_upper * 2 * 11 * 1e-7 / b.lambda_min_exact;
  CHECK(10.0 * per_step_upper == doctest::Approx(b.bound_total).epsilon(1e-14));
}

TEST_CASE("admissibility threshold") {
  const double limit = kLambdaMin / 20.0;
  CHECK(certainty_bound(kTwo, kGrid, 0.99 * limit).admissible);
  CHECK_FALSE(certainty_bound(kTwo, kGrid, 1.01 * limit).admissible);
  CHECK_FALSE(certainty_bound(kTwo, kGrid, kLambdaMin / 10.0).admissible);
}

TEST_CASE("bound is zero at zero noise and exactly linear in eta") {
  const auto zero = certainty_bound(kTwo, kGrid, 0.0);
  CHECK(zero.bound_total == 0.0);
  CHECK(zero.bound_per_step == 0.0);
  for (double eta : {1e-9, 3e-8, 1e-7}) {
    const auto a = certainty_bound(kTwo, kGrid, eta);
    const auto b = certainty_bound(kTwo, kGrid, 2.0 * eta);
    CHECK(b.bound_total == 2.0 * a.bound_total);
  }
  CHECK_THROWS_AS(certainty_bound(kTwo, kGrid, -1.0), ConfigError);
}

TEST_CASE("analytic lambda source") {
  const auto b = certainty_bound(kTwo, kGrid, 1e-7, LambdaSource::kAnalytic);
  CHECK(b.lambda_source == LambdaSource::kAnalytic);
  CHECK(b.bound_total == doctest::Approx(220.0 * std::sqrt(10.0) / std::pow(2.0625e-5, 1.5) * 1e-7).epsilon(1e-12));
  CHECK(b.admissible);
}

TEST_CASE("bound from a measured series") {
  const auto series = synthesize_autocorrelation(kTwo, kGrid);
  const auto b = certainty_bound(series, 2, 1e-7);
  CHECK(b.lambda_min_exact == doctest::Approx(kLambdaMin).epsilon(1e-8));
  CHECK(b.trace_s == doctest::Approx(10.0));
  CHECK_FALSE(b.lambda_min_analytic);
  CHECK_FALSE(b.delta_eff);
  CHECK_THROWS_AS(certainty_bound(series, 0, 1e-7), ConfigError);
}
