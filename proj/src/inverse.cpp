#include "prony/inverse.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace prony {

namespace {

// Prony polynomial z^d + c_{d-1} z^{d-1} + ... + c_0 and its derivative.
std::pair<double, double> eval_monic(const Eigen::VectorXd& c, double z) {
  const Eigen::Index d = c.size();
  double p = 1.0;
  double dp = 0.0;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    dp = dp * z + p;
    p = p * z + c(i);
  }
  return {p, dp};
}

double polish(const Eigen::VectorXd& c, double z, int steps) {
  for (int s = 0; s < steps; ++s) {
    const auto [p, dp] = eval_monic(c, z);
    if (dp == 0.0 || !std::isfinite(dp)) break;
    const double next = z - p / dp;
    if (!std::isfinite(next)) break;
    // Keep the step only when it does not increase |p|.
    if (std::abs(eval_monic(c, next).first) > std::abs(p)) break;
    z = next;
  }
  return z;
}

InversionError make_error(InversionErrorKind kind, const std::string& detail) {
  return {kind, std::string(to_string(kind)) + ": " + detail};
}

}  // namespace

void InversionConfig::validate() const {
  if (real_root_imag_tol < 0 || collision_tol < 0 || hankel_rcond_tol < 0 || refine_steps < 0)
    throw std::domain_error("InversionConfig: tolerances and refine_steps must be nonnegative");
}

const char* to_string(InversionErrorKind kind) {
  switch (kind) {
    case InversionErrorKind::SingularHankel: return "SingularHankel";
    case InversionErrorKind::ComplexRoots: return "ComplexRoots";
    case InversionErrorKind::NodeCollision: return "NodeCollision";
    case InversionErrorKind::AmplitudeSolveFailed: return "AmplitudeSolveFailed";
  }
  return "Unknown";
}

double moment_residual(const MomentVector& mu, const Signal& signal) {
  const MomentVector m = compute_moments(signal, mu.size());
  return inf_distance(m.values(), mu.values());
}

Result<Signal> solve_prony(const MomentVector& mu, std::size_t d, const InversionConfig& cfg) {
  cfg.validate();
  if (d == 0) throw std::invalid_argument("solve_prony: d must be positive");
  if (mu.size() != 2 * d) throw std::invalid_argument("solve_prony: need exactly 2d moments");

  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd hankel(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) hankel(k, l) = mu[static_cast<std::size_t>(k + l)];
    rhs(k) = -mu[static_cast<std::size_t>(k + n)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hankel);
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal().cwiseAbs();
  const double rmax = rdiag.maxCoeff();
  const double rcond = rmax > 0.0 ? rdiag.minCoeff() / rmax : 0.0;
  if (!(rcond > cfg.hankel_rcond_tol)) {
    std::ostringstream os;
    os << "Hankel reciprocal condition estimate " << rcond << " <= " << cfg.hankel_rcond_tol;
    return make_error(InversionErrorKind::SingularHankel, os.str());
  }
  const Eigen::VectorXd coeffs = qr.solve(rhs);

  std::vector<double> roots;
  roots.reserve(d);
  if (d == 1) {
    roots.push_back(-coeffs(0));
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    companion.col(n - 1) = -coeffs;
    Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, false);
    if (eig.info() != Eigen::Success)
      return make_error(InversionErrorKind::ComplexRoots, "companion eigenvalue iteration failed");
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::complex<double> z = eig.eigenvalues()(i);
      if (std::abs(z.imag()) > cfg.real_root_imag_tol * std::max(1.0, std::abs(z.real()))) {
        std::ostringstream os;
        os << "root " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
           << "i exceeds the real-root tolerance";
        return make_error(InversionErrorKind::ComplexRoots, os.str());
      }
      roots.push_back(z.real());
    }
  }
  for (double& z : roots) z = polish(coeffs, z, cfg.refine_steps);
  std::sort(roots.begin(), roots.end());

  for (std::size_t j = 0; j + 1 < roots.size(); ++j) {
    if (!(roots[j + 1] - roots[j] > cfg.collision_tol)) {
      std::ostringstream os;
      os << "nodes " << roots[j] << " and " << roots[j + 1] << " closer than "
         << cfg.collision_tol;
      return make_error(InversionErrorKind::NodeCollision, os.str());
    }
  }

  Eigen::MatrixXd vandermonde(n, n);
  Eigen::VectorXd head(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double power = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      vandermonde(k, j) = power;
      power *= roots[static_cast<std::size_t>(j)];
    }
    head(j) = mu[static_cast<std::size_t>(j)];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vandermonde);
  const double vrcond = lu.rcond();
  const Eigen::VectorXd amplitudes = lu.solve(head);
  if (!(vrcond > 1e-16) || !amplitudes.allFinite()) {
    std::ostringstream os;
    os << "Vandermonde reciprocal condition estimate " << vrcond;
    return make_error(InversionErrorKind::AmplitudeSolveFailed, os.str());
  }

  Signal signal(std::vector<double>(amplitudes.data(), amplitudes.data() + n), std::move(roots));
  const double residual = moment_residual(mu, signal);
  const double bound = 1e-8 * (1.0 + inf_norm(mu.values()));
  if (!(residual <= bound)) {
    std::ostringstream os;
    os << "moment residual " << residual << " exceeds " << bound;
    return make_error(InversionErrorKind::AmplitudeSolveFailed, os.str());
  }
  return signal;
}

}  // namespace prony
