#ifndef PRONY_CONSTRAINED_HPP
#define PRONY_CONSTRAINED_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prony/inverse.hpp"
#include "prony/leaf.hpp"
#include "prony/rng.hpp"
#include "prony/signal.hpp"

namespace prony {

/// A priori information about the signal, as a predicate on candidates.
using FeasibilityPredicate = std::function<bool(const Signal&)>;

/// 1/gamma <= |a_1| / |a_2| <= gamma for two-spike signals. gamma = infinity
/// never binds.
struct AmplitudeRatioConstraint {
  double gamma = std::numeric_limits<double>::infinity();
  /// Relative slack applied to both ends of the ratio interval.
  double slack = 1e-9;

  void validate() const;
  bool unconstrained() const { return gamma == std::numeric_limits<double>::infinity(); }
  bool operator()(const Signal& signal) const;
};

/// c0 x1 x2 - c1 (x1 + x2) + c2 = 0: the node curve of the d = 2 leaf S_2.
struct Hyperbola2 {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool degenerate = false;  // c0 == 0, the curve is a line

  double residual(double x1, double x2) const { return c0 * x1 * x2 - c1 * (x1 + x2) + c2; }
};

Hyperbola2 hyperbola_d2(const MomentVector& mu);

/// Amplitudes of the two-spike signal with nodes (x1, x2) matching mu_0, mu_1.
std::pair<double, double> amplitudes_on_leaf_d2(double x1, double x2, const MomentVector& mu);

/// a x1 + b x2 <= c (strict when `strict`).
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool strict = false;

  bool contains(double x1, double x2, double tol = 0.0) const {
    const double lhs = a * x1 + b * x2;
    return strict ? lhs < c + tol : lhs <= c + tol;
  }
};

/// The node-plane region allowed by the amplitude-ratio constraint when the
/// measured moments are (1 + eps0, eps1, ...).
std::vector<HalfPlane> gamma_polytope(double gamma, double eps, double eps0, double eps1);

/// Vertices (counter-clockwise) of the intersection of the half-planes with
/// the square [-half_width, half_width]^2. Strict inequalities are closed.
std::vector<std::array<double, 2>> clip_polygon(const std::vector<HalfPlane>& planes,
                                                double half_width);

class EmptyFeasibleSet : public std::runtime_error {
 public:
  EmptyFeasibleSet(const std::string& what, std::vector<std::size_t> feasible_counts)
      : std::runtime_error(what), counts_(std::move(feasible_counts)) {}
  const std::vector<std::size_t>& feasible_counts() const { return counts_; }

 private:
  std::vector<std::size_t> counts_;
};

class InversionFailure : public std::runtime_error {
 public:
  explicit InversionFailure(InversionError error)
      : std::runtime_error(std::string(to_string(error.kind)) + ": " + error.detail),
        error_(std::move(error)) {}
  const InversionError& error() const { return error_; }

 private:
  InversionError error_;
};

struct ImproveConfig {
  double eps = 0.0;
  double h_lower = 0.0;                // a priori lower bound on the cluster size
  RegularityParams regularity{2.0, 0.5, 1.0};
  double kappa = 0.0;
  std::size_t samples_per_leaf = 2000;
  std::uint64_t seed = 0;
  double neighborhood_scale = 1.0;     // multiplies the C4 (1/h)^q eps radius
  Execution exec = Execution::parallel;

  void validate() const;
};

struct LeafDiagnostics {
  std::size_t q = 0;
  double radius = 0.0;          // model-space neighborhood radius
  std::size_t leaf_samples = 0;
  std::size_t thickened_samples = 0;
  std::size_t failed = 0;
  std::size_t feasible = 0;
  double diameter = std::numeric_limits<double>::infinity();
};

struct ImprovedResult {
  Signal point_solution;
  std::size_t chosen_q = 0;
  double feasible_diameter = 0.0;
  Signal improved;
  std::vector<LeafDiagnostics> diagnostics;
  /// Model-space node distance of `improved` to the sampled leaf S_{q*}.
  double leaf_distance = 0.0;
  bool point_feasible = false;
};

/// Point solution, leaf sampling with thickening, constraint filtering, q*
/// selection and nearest-feasible output. Leaves are sampled on the box
/// mu'_k +- eps; each leaf point also yields one thickened copy whose nodes
/// move by at most h_lower * radius_q and whose amplitudes are refitted to
/// the leaf point's first d moments.
ImprovedResult improved_reconstruct(const MomentVector& mu_noisy, std::size_t d,
                                    const FeasibilityPredicate& constraint,
                                    const ImproveConfig& cfg);

/// Samples S_q(G) for G = to_model(F, frame), maps the samples back and
/// compares their first q + 1 moments with those of F.
bool leaf_pullback_check(const Signal& signal, const ClusterFrame& frame, std::size_t q,
                         std::size_t n = 100, std::uint64_t seed = 0);

}  // namespace prony

#endif  // PRONY_CONSTRAINED_HPP
