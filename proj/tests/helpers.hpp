#ifndef PRONY_TESTS_HELPERS_HPP
#define PRONY_TESTS_HELPERS_HPP

#include <algorithm>
#include <random>
#include <vector>

#include "prony/signal.hpp"

namespace prony::testing {

// Nodes in [-1, 1] with consecutive gaps >= eta.
inline std::vector<double> random_nodes(std::mt19937_64& gen, std::size_t d, double eta) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double slack = 2.0 - eta * static_cast<double>(d - 1);
  std::vector<double> cuts(d);
  for (double& c : cuts) c = u(gen) * slack;
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = -1.0 + cuts[j] + eta * static_cast<double>(j);
  return x;
}

// Random (eta, m, M)-regular model signal with random amplitude signs.
inline Signal random_regular(std::mt19937_64& gen, std::size_t d, double eta, double m, double M) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x = random_nodes(gen, d, eta);
  std::vector<double> a(d);
  for (double& v : a) v = (u(gen) < 0.5 ? -1.0 : 1.0) * (m + (M - m) * u(gen));
  return Signal(a, x);
}

}  // namespace prony::testing

#endif  // PRONY_TESTS_HELPERS_HPP
