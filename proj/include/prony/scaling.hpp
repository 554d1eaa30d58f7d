#ifndef PRONY_SCALING_HPP
#define PRONY_SCALING_HPP

#include <cstddef>
#include <span>

namespace prony {

/// log(error) = exponent * log(h) + intercept, fitted by least squares.
struct SlopeFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Needs at least three pairs of positive finite values.
SlopeFit fit_scaling(std::span<const double> h, std::span<const double> errors);

}  // namespace prony

#endif  // PRONY_SCALING_HPP
