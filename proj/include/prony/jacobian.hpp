#ifndef PRONY_JACOBIAN_HPP
#define PRONY_JACOBIAN_HPP

#include <Eigen/Core>
#include <optional>
#include <span>

#include "prony/signal.hpp"

namespace prony {

using DenseMatrix = Eigen::MatrixXd;

/// 2d x 2d Jacobian of the Prony mapping at G, columns ordered (a_1..a_d, x_1..x_d).
DenseMatrix jacobian(const Signal& signal);

/// Left factor U_{2d} of J = U_{2d} * blockdiag(I_d, diag(a)).
DenseMatrix confluent_vandermonde(std::span<const double> nodes);

/// d x d Vandermonde matrix V_{k,j} = x_j^k.
DenseMatrix vandermonde(std::span<const double> nodes);

/// Maximum absolute row sum.
double inf_norm(const DenseMatrix& a);

/// ||A^{-1}||_inf from an explicit inverse (LU with partial pivoting).
double inverse_inf_norm(const DenseMatrix& a);

/// Gautschi's bound on ||V_d^{-1}||_inf.
double gautschi_vandermonde_bound(std::span<const double> nodes);

/// Gautschi's bound on ||U_{2d}^{-1}||_inf for the confluent matrix.
double gautschi_confluent_bound(std::span<const double> nodes);

struct RegularBounds {
  double vandermonde = 0.0;
  double confluent = 0.0;
};

/// Node-independent versions of both bounds for |x_i| <= 1, gaps >= eta.
RegularBounds regular_bounds(double eta, std::size_t d);

/// The explicit constants of the inverse-function, worst-case and remainder
/// estimates for given (d, eta, m, M, kappa).
///
///   C1 = max(1, 1/m) * confluent bound,   C2 = d + M (2d-1) d
///   C5 = 6 (M+1) (2d-1)^2 d,              r  = 1 / (4 C5 C1),   R = r / (2 C2)
///   C3 = 2 C1 / (1 + 2 C1 C2),            C4 = 2 C1
///   C8 = Vandermonde bound
///   C6 = min((1+|kappa|)^{2d-1} / (2 C8 C5 C4), R)
///   C7 = min((1+|kappa|)^{2d-1} / (2 max(1, 1/m) C8 C5 C4), R)
///   K3 = C3 (1+|kappa|)^{-2d+1} / (2 C8 d (d-1) M)      (d >= 2 only)
///   K4 = C3 (1+|kappa|)^{-2d+1} / (2 max(1, 1/m) C8 d)
struct ConstantsBundle {
  std::size_t d = 0;
  RegularityParams params;
  double kappa = 0.0;

  double C1 = 0, C2 = 0, C3 = 0, C4 = 0, C5 = 0, C6 = 0, C7 = 0, C8 = 0;
  double r = 0, R = 0;
  std::optional<double> K3;
  double K4 = 0;

  /// K3; throws std::domain_error when d = 1.
  double k3() const;
};

ConstantsBundle compute_constants(std::size_t d, const RegularityParams& params, double kappa);

struct RemainderCheck {
  bool holds = false;
  double remainder = 0.0;
  double bound = 0.0;
};

/// Second-order remainder of the linearization of PM at G, compared with
/// C5 * ||G' - G||^2. Requires ||G' - G|| <= 1 / (2d - 1).
RemainderCheck remainder_bound_check(const Signal& base, const Signal& perturbed,
                                     const ConstantsBundle& bundle);

}  // namespace prony

#endif  // PRONY_JACOBIAN_HPP
