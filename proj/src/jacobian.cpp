#include "prony/jacobian.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace prony {

namespace {

void require_distinct(std::span<const double> x, const char* who) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[i] == x[j]) throw std::domain_error(std::string(who) + ": coincident nodes");
}

// prod_{j != lambda} (1 + |x_j|) / |x_lambda - x_j|; 1 when d = 1.
double lagrange_factor(std::span<const double> x, std::size_t lambda) {
  double p = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (j != lambda) p *= (1.0 + std::abs(x[j])) / std::abs(x[lambda] - x[j]);
  return p;
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

DenseMatrix confluent_vandermonde(std::span<const double> x) {
  const auto d = static_cast<Eigen::Index>(x.size());
  const Eigen::Index K = 2 * d;
  DenseMatrix u = DenseMatrix::Zero(K, K);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    double power = 1.0;  // x_j^k
    double prev = 0.0;   // x_j^{k-1}
    for (Eigen::Index k = 0; k < K; ++k) {
      u(k, j) = power;
      u(k, d + j) = static_cast<double>(k) * prev;
      prev = power;
      power *= xj;
    }
  }
  return u;
}

DenseMatrix jacobian(const Signal& signal) {
  DenseMatrix j = confluent_vandermonde(signal.nodes());
  const auto d = static_cast<Eigen::Index>(signal.size());
  for (Eigen::Index i = 0; i < d; ++i) j.col(d + i) *= signal.amplitudes()[static_cast<std::size_t>(i)];
  return j;
}

DenseMatrix vandermonde(std::span<const double> x) {
  const auto d = static_cast<Eigen::Index>(x.size());
  DenseMatrix v(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double power = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      v(k, j) = power;
      power *= x[static_cast<std::size_t>(j)];
    }
  }
  return v;
}

double inf_norm(const DenseMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double inverse_inf_norm(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse_inf_norm: matrix not square");
  Eigen::PartialPivLU<DenseMatrix> lu(a);
  const DenseMatrix inv = lu.inverse();
  if (!inv.allFinite()) throw std::domain_error("inverse_inf_norm: singular matrix");
  return inf_norm(inv);
}

double gautschi_vandermonde_bound(std::span<const double> x) {
  require_distinct(x, "gautschi_vandermonde_bound");
  double best = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) best = std::max(best, lagrange_factor(x, l));
  return best;
}

double gautschi_confluent_bound(std::span<const double> x) {
  require_distinct(x, "gautschi_confluent_bound");
  double best = 0.0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    double inv_gaps = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != l) inv_gaps += 1.0 / std::abs(x[l] - x[j]);
    const double scale = 1.0 + std::abs(x[l]);
    const double b = std::max(scale, 1.0 + 2.0 * scale * inv_gaps);
    const double p = lagrange_factor(x, l);
    best = std::max(best, b * p * p);
  }
  return best;
}

RegularBounds regular_bounds(double eta, std::size_t d) {
  if (!(eta > 0.0)) throw std::domain_error("regular_bounds: eta must be positive");
  if (d == 0) throw std::domain_error("regular_bounds: d must be positive");
  const double dd = static_cast<double>(d);
  const double half_fact = factorial(d / 2);
  RegularBounds b;
  b.vandermonde = std::pow(eta, 1.0 - dd) * std::pow(2.0, dd - 1.0) / (half_fact * half_fact);
  b.confluent = (1.0 + 4.0 / eta * (std::log(dd) + 1.0)) * b.vandermonde * b.vandermonde;
  return b;
}

double ConstantsBundle::k3() const {
  if (!K3) throw std::domain_error("K3 is undefined for d = 1 (denominator d(d-1) vanishes)");
  return *K3;
}

ConstantsBundle compute_constants(std::size_t d, const RegularityParams& params, double kappa) {
  params.validate();
  if (d == 0) throw std::domain_error("compute_constants: d must be positive");
  if (d > 1 && params.eta > 2.0 / static_cast<double>(d - 1) * (1.0 + 1e-12))
    throw std::domain_error("compute_constants: eta must not exceed 2/(d-1)");
  if (!std::isfinite(kappa)) throw std::domain_error("compute_constants: kappa must be finite");

  const double dd = static_cast<double>(d);
  const double odd = 2.0 * dd - 1.0;
  const double inv_m = std::max(1.0, 1.0 / params.m);
  const RegularBounds bounds = regular_bounds(params.eta, d);
  const double shift_gain = std::pow(1.0 + std::abs(kappa), odd);

  ConstantsBundle c;
  c.d = d;
  c.params = params;
  c.kappa = kappa;
  c.C1 = inv_m * bounds.confluent;
  c.C2 = dd + params.M * odd * dd;
  c.C5 = 6.0 * (params.M + 1.0) * odd * odd * dd;
  c.r = 1.0 / (4.0 * c.C5 * c.C1);
  c.R = c.r / (2.0 * c.C2);
  c.C3 = 2.0 * c.C1 / (1.0 + 2.0 * c.C1 * c.C2);
  c.C4 = 2.0 * c.C1;
  c.C8 = bounds.vandermonde;
  c.C6 = std::min(shift_gain / (2.0 * c.C8 * c.C5 * c.C4), c.R);
  c.C7 = std::min(shift_gain / (2.0 * inv_m * c.C8 * c.C5 * c.C4), c.R);
  if (d >= 2) c.K3 = c.C3 / shift_gain / (2.0 * c.C8 * dd * (dd - 1.0) * params.M);
  c.K4 = c.C3 / shift_gain / (2.0 * inv_m * c.C8 * dd);
  return c;
}

RemainderCheck remainder_bound_check(const Signal& base, const Signal& perturbed,
                                     const ConstantsBundle& bundle) {
  const std::size_t d = base.size();
  if (perturbed.size() != d || bundle.d != d)
    throw std::invalid_argument("remainder_bound_check: dimension mismatch");
  const double step = distance(base, perturbed);
  if (step > 1.0 / (2.0 * static_cast<double>(d) - 1.0))
    throw std::domain_error("remainder_bound_check: ||G' - G|| exceeds 1/(2d-1)");

  const std::size_t K = 2 * d;
  const MomentVector m0 = compute_moments(base, K);
  const MomentVector m1 = compute_moments(perturbed, K);
  const std::vector<double> p0 = base.parameters();
  const std::vector<double> p1 = perturbed.parameters();
  Eigen::VectorXd delta(static_cast<Eigen::Index>(K));
  for (std::size_t i = 0; i < K; ++i) delta(static_cast<Eigen::Index>(i)) = p1[i] - p0[i];
  const Eigen::VectorXd linear = jacobian(base) * delta;

  RemainderCheck out;
  for (std::size_t k = 0; k < K; ++k)
    out.remainder = std::max(out.remainder,
                             std::abs((m1[k] - m0[k]) - linear(static_cast<Eigen::Index>(k))));
  out.bound = bundle.C5 * step * step;
  out.holds = out.remainder <= out.bound;
  return out;
}

}  // namespace prony
