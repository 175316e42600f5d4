#pragma once

#include <span>

namespace hinv::stats {

// Median of the finite-or-infinite values; NaN on empty input.
double median(std::span<const double> xs);

// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

struct RankCorrelation {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, Student-t approximation
};

// Spearman correlation with average ranks for ties.
RankCorrelation spearman(std::span<const double> x, std::span<const double> y);

}  // namespace hinv::stats
