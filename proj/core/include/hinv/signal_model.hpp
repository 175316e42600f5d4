#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hinv {

using Complex = std::complex<double>;

/// Hidden ground truth of a signal: K distinct angular frequencies with
/// positive weights d_k. Modes are stored sorted by ascending frequency.
class FrequencyModel {
 public:
  enum class Normalization { kFree, kAsserted };

  FrequencyModel(std::vector<double> omegas, std::vector<double> amps,
                 Normalization norm = Normalization::kFree);

  std::span<const double> omegas() const { return omegas_; }
  std::span<const double> amps() const { return amps_; }
  int size() const { return static_cast<int>(omegas_.size()); }
  bool normalized() const { return norm_ == Normalization::kAsserted; }

  double amp_sum() const;
  // Largest pairwise frequency difference, 0 for K = 1.
  double max_gap() const;
  double min_gap() const;

 private:
  std::vector<double> omegas_;
  std::vector<double> amps_;
  Normalization norm_;
};

struct SamplingGrid {
  double delta_t = 0.0;
  int n_steps = 0;

  SamplingGrid() = default;
  SamplingGrid(double dt, int n);

  double total_time() const { return delta_t * n_steps; }
  int sample_count() const { return n_steps + 1; }
};

// T * max_gap below `threshold`.
bool short_time_regime(const FrequencyModel& model, const SamplingGrid& grid,
                       double threshold = 0.1);

/// Autocorrelation samples c_0..c_N with the noise ceiling they carry.
class AutocorrSeries {
 public:
  AutocorrSeries(std::vector<Complex> values, SamplingGrid grid, double eta_max = 0.0);

  std::span<const Complex> values() const { return values_; }
  const SamplingGrid& grid() const { return grid_; }
  double eta_max() const { return eta_max_; }
  int n_steps() const { return grid_.n_steps; }

  // c_j for j >= 0, conj(c_{-j}) otherwise. Throws ConfigError when |j| > N.
  Complex at(int j) const;

 private:
  std::vector<Complex> values_;
  SamplingGrid grid_;
  double eta_max_;
};

enum class NoiseKind { kUniformDisk, kTruncatedGaussian };

struct NoiseSpec {
  double eta_max = 0.0;  // base ceiling; divided by sqrt(copies) when set
  NoiseKind kind = NoiseKind::kUniformDisk;
  std::uint64_t seed = 0;
  std::optional<int> copies;

  double effective_eta() const;
};

AutocorrSeries synthesize_autocorrelation(const FrequencyModel& model, const SamplingGrid& grid);

// Adds independent complex noise with |eta_n| <= spec.effective_eta() to each
// sample. Deterministic for a fixed seed. The input must be exact.
AutocorrSeries apply_noise(const AutocorrSeries& series, const NoiseSpec& spec);

inline Complex series_value(const AutocorrSeries& series, int j) { return series.at(j); }

}  // namespace hinv
