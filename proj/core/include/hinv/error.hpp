#pragma once

#include <stdexcept>
#include <string>

namespace hinv {

// Invalid input: bad model, grid, config field or out-of-range argument.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical stage failed: eigensolver non-convergence, missing spectral gap,
// rank-deficient least squares, non-positive lambda_min.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hinv
