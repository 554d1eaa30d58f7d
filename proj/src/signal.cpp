#include "prony/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace prony {

namespace {

constexpr std::size_t kMaxBinomialRows = 64;

// Pascal's triangle in exact integer arithmetic; C(63, 31) < 2^63.
const std::array<std::array<std::uint64_t, kMaxBinomialRows>, kMaxBinomialRows>& pascal() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kMaxBinomialRows>, kMaxBinomialRows> t{};
    for (std::size_t n = 0; n < kMaxBinomialRows; ++n) {
      t[n][0] = 1;
      for (std::size_t k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

Signal::Signal(std::vector<double> amplitudes, std::vector<double> nodes) {
  if (amplitudes.size() != nodes.size())
    throw std::invalid_argument("Signal: amplitudes and nodes differ in length");
  if (nodes.empty()) throw std::invalid_argument("Signal: need at least one node");
  require_finite(amplitudes, "Signal amplitudes");
  require_finite(nodes, "Signal nodes");

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return nodes[i] < nodes[j]; });

  amplitudes_.reserve(order.size());
  nodes_.reserve(order.size());
  for (std::size_t i : order) {
    if (!nodes_.empty() && !(nodes[i] > nodes_.back()))
      throw std::invalid_argument("Signal: nodes must be pairwise distinct");
    amplitudes_.push_back(amplitudes[i]);
    nodes_.push_back(nodes[i]);
  }
}

std::vector<double> Signal::parameters() const {
  std::vector<double> p(amplitudes_);
  p.insert(p.end(), nodes_.begin(), nodes_.end());
  return p;
}

Signal Signal::from_parameters(std::span<const double> params) {
  if (params.size() % 2 != 0 || params.empty())
    throw std::invalid_argument("Signal::from_parameters: need 2d entries");
  const std::size_t d = params.size() / 2;
  return Signal({params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d)},
                {params.begin() + static_cast<std::ptrdiff_t>(d), params.end()});
}

MomentVector::MomentVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("MomentVector: need at least one moment");
  require_finite(values_, "MomentVector values");
}

void ClusterFrame::validate() const {
  if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(kappa))
    throw std::domain_error("ClusterFrame: h must be positive and finite");
}

void RegularityParams::validate() const {
  if (!(eta > 0.0)) throw std::domain_error("RegularityParams: eta must be positive");
  if (!(m > 0.0) || !(M > m)) throw std::domain_error("RegularityParams: need 0 < m < M");
}

double inf_norm(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

double inf_distance(std::span<const double> lhs, std::span<const double> rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("inf_distance: size mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) r = std::max(r, std::abs(lhs[i] - rhs[i]));
  return r;
}

double amplitude_distance(const Signal& lhs, const Signal& rhs) {
  return inf_distance(lhs.amplitudes(), rhs.amplitudes());
}

double node_distance(const Signal& lhs, const Signal& rhs) {
  return inf_distance(lhs.nodes(), rhs.nodes());
}

double distance(const Signal& lhs, const Signal& rhs) {
  return std::max(amplitude_distance(lhs, rhs), node_distance(lhs, rhs));
}

MomentVector compute_moments(const Signal& signal, std::size_t count) {
  if (count == 0) throw std::invalid_argument("compute_moments: count must be positive");
  std::vector<double> m(count, 0.0);
  const auto a = signal.amplitudes();
  const auto x = signal.nodes();
  for (std::size_t j = 0; j < signal.size(); ++j) {
    // a_j * x_j^k by running product; 0^0 = 1.
    double term = a[j];
    for (std::size_t k = 0; k < count; ++k) {
      m[k] += term;
      term *= x[j];
    }
  }
  return MomentVector(std::move(m));
}

double binomial(std::size_t n, std::size_t k) {
  if (n >= kMaxBinomialRows) throw std::domain_error("binomial: n must be below 64");
  if (k > n) return 0.0;
  return static_cast<double>(pascal()[n][k]);
}

std::vector<double> shift_matrix(double kappa, std::size_t count) {
  std::vector<double> s(count * count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    // (-kappa)^{k-l} for l = k down to 0.
    double power = 1.0;
    for (std::size_t l = k + 1; l-- > 0;) {
      s[k * count + l] = binomial(k, l) * power;
      power *= -kappa;
    }
  }
  return s;
}

MomentVector shift_moments(const MomentVector& mu, double kappa) {
  const std::size_t K = mu.size();
  if (K > kMaxBinomialRows) throw std::domain_error("shift_moments: at most 64 moments");
  if (kappa == 0.0) return mu;
  const auto s = shift_matrix(kappa, K);
  std::vector<double> nu(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t l = 0; l <= k; ++l) acc += s[k * K + l] * mu[l];
    nu[k] = acc;
  }
  return MomentVector(std::move(nu));
}

MomentVector scale_moments(const MomentVector& mu, double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw std::domain_error("scale_moments: alpha must be nonzero and finite");
  std::vector<double> nu(mu.size());
  double power = 1.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    nu[k] = power * mu[k];
    power *= alpha;
  }
  return MomentVector(std::move(nu));
}

Signal shift_signal(const Signal& signal, double kappa) {
  std::vector<double> x(signal.nodes().begin(), signal.nodes().end());
  for (double& v : x) v -= kappa;
  return Signal({signal.amplitudes().begin(), signal.amplitudes().end()}, std::move(x));
}

Signal scale_signal(const Signal& signal, double alpha) {
  if (alpha == 0.0) throw std::domain_error("scale_signal: alpha must be nonzero");
  std::vector<double> x(signal.nodes().begin(), signal.nodes().end());
  for (double& v : x) v *= alpha;
  return Signal({signal.amplitudes().begin(), signal.amplitudes().end()}, std::move(x));
}

ClusterFrame cluster_frame(const Signal& signal) {
  if (signal.size() < 2) throw DegenerateCluster("cluster_frame: need at least two nodes");
  const auto x = signal.nodes();
  const double lo = x.front();
  const double hi = x.back();
  ClusterFrame frame{0.5 * (lo + hi), 0.5 * (hi - lo)};
  if (!(frame.h > 0.0)) throw DegenerateCluster("cluster_frame: zero-width node interval");
  return frame;
}

Signal to_model(const Signal& signal, const ClusterFrame& frame) {
  frame.validate();
  std::vector<double> x(signal.nodes().begin(), signal.nodes().end());
  for (double& v : x) v = (v - frame.kappa) / frame.h;
  return Signal({signal.amplitudes().begin(), signal.amplitudes().end()}, std::move(x));
}

Signal denormalize(const Signal& model, const ClusterFrame& frame) {
  frame.validate();
  std::vector<double> x(model.nodes().begin(), model.nodes().end());
  for (double& v : x) v = frame.h * v + frame.kappa;
  return Signal({model.amplitudes().begin(), model.amplitudes().end()}, std::move(x));
}

Normalized normalize(const Signal& signal) {
  const ClusterFrame frame = cluster_frame(signal);
  std::vector<double> x(signal.nodes().begin(), signal.nodes().end());
  for (double& v : x) v = (v - frame.kappa) / frame.h;
  // Pin the endpoints so that h(G) = 1 and kappa(G) = 0 hold exactly.
  x.front() = -1.0;
  x.back() = 1.0;
  return {Signal({signal.amplitudes().begin(), signal.amplitudes().end()}, std::move(x)), frame};
}

RegularityReport check_regular(const Signal& model, const RegularityParams& params) {
  params.validate();
  RegularityReport report;
  auto fail = [&](std::string msg) {
    report.regular = false;
    report.violations.push_back(std::move(msg));
  };
  const auto x = model.nodes();
  const auto a = model.amplitudes();
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (std::abs(x[j]) > 1.0) {
      std::ostringstream os;
      os << "node " << j + 1 << " = " << x[j] << " outside [-1, 1]";
      fail(os.str());
    }
    if (j + 1 < model.size() && x[j + 1] - x[j] < params.eta) {
      std::ostringstream os;
      os << "gap between nodes " << j + 1 << " and " << j + 2 << " is " << x[j + 1] - x[j]
         << " < eta = " << params.eta;
      fail(os.str());
    }
    const double mag = std::abs(a[j]);
    if (mag < params.m) {
      std::ostringstream os;
      os << "|a_" << j + 1 << "| = " << mag << " below m = " << params.m;
      fail(os.str());
    }
    if (mag > params.M) {
      std::ostringstream os;
      os << "|a_" << j + 1 << "| = " << mag << " above M = " << params.M;
      fail(os.str());
    }
  }
  return report;
}

ClusterRegularity check_regular_cluster(const Signal& signal, const RegularityParams& params) {
  auto [model, frame] = normalize(signal);
  return {check_regular(model, params), frame};
}

}  // namespace prony
