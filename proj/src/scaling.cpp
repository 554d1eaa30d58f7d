#include "prony/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace prony {

SlopeFit fit_scaling(std::span<const double> h, std::span<const double> errors) {
  if (h.size() != errors.size()) throw std::invalid_argument("fit_scaling: length mismatch");
  if (h.size() < 3) throw std::domain_error("fit_scaling: need at least three points");
  const std::size_t n = h.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(h[i]) || !std::isfinite(errors[i]))
      throw std::domain_error("fit_scaling: values must be positive and finite");
    lx[i] = std::log(h[i]);
    ly[i] = std::log(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("fit_scaling: h values must not all be equal");

  SlopeFit fit;
  fit.points = n;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::min(1.0, sxy * sxy / (sxx * syy));
  return fit;
}

}  // namespace prony
