#include "hinv/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hinv/error.hpp"

namespace hinv {

FrequencyModel::FrequencyModel(std::vector<double> omegas, std::vector<double> amps,
                               Normalization norm)
    : norm_(norm) {
  if (omegas.empty()) throw ConfigError("frequency model needs at least one mode");
  if (omegas.size() != amps.size())
    throw ConfigError("frequency model: omegas and amps differ in length");
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    if (!std::isfinite(omegas[k])) throw ConfigError("frequency model: non-finite omega");
    if (!(amps[k] > 0.0) || !std::isfinite(amps[k]))
      throw ConfigError("frequency model: amplitudes must be strictly positive");
  }

  std::vector<std::size_t> order(omegas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return omegas[a] < omegas[b]; });
  omegas_.reserve(order.size());
  amps_.reserve(order.size());
  for (auto i : order) {
    omegas_.push_back(omegas[i]);
    amps_.push_back(amps[i]);
  }
  for (std::size_t k = 1; k < omegas_.size(); ++k) {
    if (omegas_[k] == omegas_[k - 1])
      throw ConfigError("frequency model: duplicate frequency " + std::to_string(omegas_[k]));
  }
  if (normalized() && std::abs(amp_sum() - 1.0) > 1e-12)
    throw ConfigError("frequency model: normalization asserted but sum of amps != 1");
}

double FrequencyModel::amp_sum() const {
  return std::accumulate(amps_.begin(), amps_.end(), 0.0);
}

double FrequencyModel::max_gap() const { return omegas_.back() - omegas_.front(); }

double FrequencyModel::min_gap() const {
  if (omegas_.size() < 2) return 0.0;
  double gap = omegas_[1] - omegas_[0];
  for (std::size_t k = 2; k < omegas_.size(); ++k) gap = std::min(gap, omegas_[k] - omegas_[k - 1]);
  return gap;
}

SamplingGrid::SamplingGrid(double dt, int n) : delta_t(dt), n_steps(n) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sampling grid: delta_t must be > 0");
  if (n < 1) throw ConfigError("sampling grid: n_steps must be >= 1");
}

bool short_time_regime(const FrequencyModel& model, const SamplingGrid& grid, double threshold) {
  return grid.total_time() * model.max_gap() < threshold;
}

AutocorrSeries::AutocorrSeries(std::vector<Complex> values, SamplingGrid grid, double eta_max)
    : values_(std::move(values)), grid_(grid), eta_max_(eta_max) {
  if (static_cast<int>(values_.size()) != grid_.sample_count())
    throw ConfigError("autocorrelation series: expected N+1 = " +
                      std::to_string(grid_.sample_count()) + " samples, got " +
                      std::to_string(values_.size()));
  if (!(eta_max_ >= 0.0)) throw ConfigError("autocorrelation series: eta_max must be >= 0");
}

Complex AutocorrSeries::at(int j) const {
  if (std::abs(j) > grid_.n_steps)
    throw ConfigError("series index " + std::to_string(j) + " outside [-N, N]");
  return j >= 0 ? values_[j] : std::conj(values_[-j]);
}

double NoiseSpec::effective_eta() const {
  if (!copies) return eta_max;
  if (*copies < 1) throw ConfigError("noise.copies must be >= 1");
  return eta_max / std::sqrt(static_cast<double>(*copies));
}

AutocorrSeries synthesize_autocorrelation(const FrequencyModel& model, const SamplingGrid& grid) {
  if (grid.n_steps < model.size())
    throw ConfigError("grid has N = " + std::to_string(grid.n_steps) + " < K = " +
                      std::to_string(model.size()));
  std::vector<Complex> c(grid.sample_count());
  const auto omegas = model.omegas();
  const auto amps = model.amps();
  for (int n = 0; n < grid.sample_count(); ++n) {
    Complex sum{0.0, 0.0};
    for (int k = 0; k < model.size(); ++k)
      sum += amps[k] * std::polar(1.0, -omegas[k] * n * grid.delta_t);
    c[n] = sum;
  }
  // Exactly real at n = 0.
  c[0] = Complex(model.amp_sum(), 0.0);
  return AutocorrSeries(std::move(c), grid, 0.0);
}

AutocorrSeries apply_noise(const AutocorrSeries& series, const NoiseSpec& spec) {
  if (series.eta_max() != 0.0) throw ConfigError("apply_noise: input series is already noisy");
  const double eta = spec.effective_eta();
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("noise.eta_max must be >= 0");

  std::vector<Complex> out(series.values().begin(), series.values().end());
  if (eta == 0.0) return AutocorrSeries(std::move(out), series.grid(), 0.0);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, eta / 3.0);
  constexpr double kTwoPi = 6.283185307179586;

  for (auto& c : out) {
    Complex eta_n;
    // Redraw on the rare rounding overshoot too, so |eta_n| <= eta holds exactly.
    do {
      if (spec.kind == NoiseKind::kUniformDisk) {
        const double r = eta * std::sqrt(unit(rng));
        eta_n = std::polar(r, kTwoPi * unit(rng));
      } else {
        eta_n = Complex(gauss(rng), gauss(rng));
      }
    } while (std::abs(eta_n) > eta);
    c += eta_n;
  }
  return AutocorrSeries(std::move(out), series.grid(), eta);
}

}  // namespace hinv
