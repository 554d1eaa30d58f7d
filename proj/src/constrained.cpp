#include "prony/constrained.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>

#include "prony/jacobian.hpp"
#include "prony/parallel.hpp"

namespace prony {

namespace {

// Amplitudes for fixed nodes from the first d moments.
std::optional<Signal> refit_amplitudes(std::span<const double> nodes, std::span<const double> mu) {
  const std::size_t d = nodes.size();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (nodes[i] == nodes[j]) return std::nullopt;
  const DenseMatrix v = vandermonde(nodes);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) rhs(static_cast<Eigen::Index>(k)) = mu[k];
  const Eigen::VectorXd a = v.partialPivLu().solve(rhs);
  if (!a.allFinite()) return std::nullopt;
  return Signal(std::vector<double>(a.data(), a.data() + a.size()),
                std::vector<double>(nodes.begin(), nodes.end()));
}

double sampled_diameter(const std::vector<std::vector<double>>& pts, Execution exec) {
  if (pts.size() < 2) return 0.0;
  std::vector<double> row(pts.size(), 0.0);
  for_each_index(pts.size(), exec, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, inf_distance(pts[i], pts[j]));
    row[i] = best;
  });
  return *std::max_element(row.begin(), row.end());
}

struct LeafFamily {
  LeafDiagnostics diag;
  std::vector<Signal> leaf;      // points on S_q
  std::vector<Signal> feasible;  // leaf and thickened points passing the constraint
};

}  // namespace

void AmplitudeRatioConstraint::validate() const {
  if (!(gamma >= 1.0)) throw std::domain_error("AmplitudeRatioConstraint: gamma must be >= 1");
  if (!(slack >= 0.0)) throw std::domain_error("AmplitudeRatioConstraint: slack must be >= 0");
}

bool AmplitudeRatioConstraint::operator()(const Signal& signal) const {
  if (signal.size() != 2)
    throw std::invalid_argument("AmplitudeRatioConstraint applies to two-spike signals");
  if (unconstrained()) return true;
  const double a1 = std::abs(signal.amplitudes()[0]);
  const double a2 = std::abs(signal.amplitudes()[1]);
  return a1 * gamma * (1.0 + slack) >= a2 && a1 <= gamma * a2 * (1.0 + slack);
}

Hyperbola2 hyperbola_d2(const MomentVector& mu) {
  if (mu.size() < 3) throw std::invalid_argument("hyperbola_d2: need at least three moments");
  Hyperbola2 h{mu[0], mu[1], mu[2], false};
  h.degenerate = h.c0 == 0.0;
  return h;
}

std::pair<double, double> amplitudes_on_leaf_d2(double x1, double x2, const MomentVector& mu) {
  if (mu.size() < 2) throw std::invalid_argument("amplitudes_on_leaf_d2: need m_0 and m_1");
  if (x1 == x2) throw std::domain_error("amplitudes_on_leaf_d2: coincident nodes");
  const double gap = x2 - x1;
  return {(mu[0] * x2 - mu[1]) / gap, (-mu[0] * x1 + mu[1]) / gap};
}

std::vector<HalfPlane> gamma_polytope(double gamma, double eps, double eps0, double eps1) {
  if (!(gamma >= 1.0)) throw std::domain_error("gamma_polytope: gamma must be >= 1");
  if (!(eps >= 0.0) || eps >= 1.0) throw std::domain_error("gamma_polytope: eps must lie in [0, 1)");
  if (std::abs(eps0) > eps || std::abs(eps1) > eps)
    throw std::domain_error("gamma_polytope: |eps0|, |eps1| must not exceed eps");
  const double t = eps / (1.0 - eps);
  return {
      {1.0, -1.0, 0.0, true},
      {gamma, 1.0, (1.0 + gamma) * t, false},
      {-1.0 / gamma, -1.0, (1.0 + 1.0 / gamma) * t, false},
  };
}

std::vector<std::array<double, 2>> clip_polygon(const std::vector<HalfPlane>& planes,
                                                double half_width) {
  if (!(half_width > 0.0)) throw std::domain_error("clip_polygon: half_width must be positive");
  const double w = half_width;
  std::vector<std::array<double, 2>> poly{{-w, -w}, {w, -w}, {w, w}, {-w, w}};
  for (const HalfPlane& p : planes) {
    std::vector<std::array<double, 2>> out;
    auto value = [&](const std::array<double, 2>& v) { return p.a * v[0] + p.b * v[1] - p.c; };
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& cur = poly[i];
      const auto& next = poly[(i + 1) % poly.size()];
      const double fc = value(cur);
      const double fn = value(next);
      if (fc <= 0.0) out.push_back(cur);
      if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
        const double t = fc / (fc - fn);
        out.push_back({cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])});
      }
    }
    poly = std::move(out);
    if (poly.empty()) break;
  }
  return poly;
}

void ImproveConfig::validate() const {
  if (!(eps > 0.0)) throw std::domain_error("ImproveConfig: eps must be positive");
  if (!(h_lower > 0.0)) throw std::domain_error("ImproveConfig: h_lower must be positive");
  if (samples_per_leaf == 0) throw std::domain_error("ImproveConfig: samples_per_leaf must be >= 1");
  if (!(neighborhood_scale >= 0.0))
    throw std::domain_error("ImproveConfig: neighborhood_scale must be >= 0");
  regularity.validate();
}

ImprovedResult improved_reconstruct(const MomentVector& mu_noisy, std::size_t d,
                                    const FeasibilityPredicate& constraint,
                                    const ImproveConfig& cfg) {
  cfg.validate();
  if (mu_noisy.size() != 2 * d) throw std::invalid_argument("improved_reconstruct: need 2d moments");
  auto point = solve_prony(mu_noisy, d);
  if (!point) throw InversionFailure(point.error());
  const Signal& F1 = *point;

  const std::size_t K = 2 * d;
  const ConstantsBundle constants = compute_constants(d, cfg.regularity, cfg.kappa);
  const CounterRng root(cfg.seed);

  std::vector<LeafFamily> families(K);
  for (std::size_t q = 0; q < K; ++q) {
    LeafFamily& fam = families[q];
    fam.diag.q = q;
    fam.diag.radius = cfg.neighborhood_scale * constants.C4 *
                      std::pow(1.0 / cfg.h_lower, static_cast<double>(q)) * cfg.eps;
    const double node_shift = cfg.h_lower * fam.diag.radius;

    const LeafSpec spec = LeafSpec::from_moments(mu_noisy, q);
    const std::vector<double> box(spec.free_count(), cfg.eps);
    // The point leaf S_{2d-1} is drawn repeatedly so that its thickening is sampled too.
    const std::size_t draws = cfg.samples_per_leaf;
    const CounterRng leaf_rng = root.substream(q);
    SampleCloud cloud;
    try {
      cloud = sample_leaf(spec, box, draws, leaf_rng.stream(), cfg.exec);
    } catch (const AllInversionsFailed&) {
      fam.diag.failed = draws;
      continue;
    }
    fam.diag.failed = cloud.failed;

    const CounterRng thick_rng = leaf_rng.substream(1);
    std::vector<std::optional<Signal>> thick(cloud.points.size());
    for_each_index(cloud.points.size(), cfg.exec, [&](std::size_t i) {
      const Signal& s = cloud.points[i].signal;
      std::vector<double> nodes(s.nodes().begin(), s.nodes().end());
      for (std::size_t j = 0; j < d; ++j)
        nodes[j] += thick_rng.uniform(i * d + j, -node_shift, node_shift);
      thick[i] = refit_amplitudes(nodes, cloud.points[i].source.values());
    });

    std::vector<std::vector<double>> feasible_params;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      const Signal& s = cloud.points[i].signal;
      fam.leaf.push_back(s);
      if (constraint(s)) fam.feasible.push_back(s);
      if (thick[i]) {
        ++fam.diag.thickened_samples;
        if (constraint(*thick[i])) fam.feasible.push_back(*thick[i]);
      }
    }
    fam.diag.leaf_samples = fam.leaf.size();
    fam.diag.feasible = fam.feasible.size();
    for (const Signal& s : fam.feasible) feasible_params.push_back(s.parameters());
    if (!fam.feasible.empty()) fam.diag.diameter = sampled_diameter(feasible_params, cfg.exec);
  }

  std::optional<std::size_t> best;
  for (std::size_t q = 0; q < K; ++q)
    if (families[q].diag.feasible > 0 && (!best || families[q].diag.diameter < families[*best].diag.diameter))
      best = q;
  if (!best) {
    std::vector<std::size_t> counts;
    for (const auto& f : families) counts.push_back(f.diag.feasible);
    throw EmptyFeasibleSet("improved_reconstruct: no sampled point satisfies the constraint", counts);
  }

  const LeafFamily& chosen = families[*best];
  ImprovedResult result{F1, *best, chosen.diag.diameter, F1, {}, 0.0, constraint(F1)};
  for (const auto& f : families) result.diagnostics.push_back(f.diag);
  if (!result.point_feasible) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Signal& s : chosen.feasible) {
      const double dist = distance(s, F1);
      if (dist < nearest) {
        nearest = dist;
        result.improved = s;
      }
    }
  }
  // F' itself lies on every leaf of mu'.
  double leaf_dist = node_distance(result.improved, F1) / cfg.h_lower;
  for (const Signal& s : chosen.leaf) leaf_dist = std::min(leaf_dist, node_distance(result.improved, s) / cfg.h_lower);
  result.leaf_distance = leaf_dist;
  return result;
}

bool leaf_pullback_check(const Signal& signal, const ClusterFrame& frame, std::size_t q,
                         std::size_t n, std::uint64_t seed) {
  frame.validate();
  const std::size_t K = 2 * signal.size();
  if (q >= K) throw std::domain_error("leaf_pullback_check: q must lie in [0, 2d-1]");
  const Signal model = to_model(signal, frame);
  const LeafSpec spec = LeafSpec::from_moments(compute_moments(model, K), q);
  const std::vector<double> box(spec.free_count(), 0.05);
  const std::size_t draws = spec.free_count() == 0 ? 1 : n;
  const SampleCloud cloud = sample_leaf(spec, box, draws, seed, Execution::serial);

  const MomentVector mu = compute_moments(signal, K);
  const double tol = 1e-8 * (1.0 + inf_norm(mu.values()));
  for (const CloudPoint& p : cloud.points) {
    const MomentVector back = compute_moments(denormalize(p.signal, frame), q + 1);
    for (std::size_t k = 0; k <= q; ++k)
      if (std::abs(back[k] - mu[k]) > tol) return false;
  }
  return !cloud.points.empty();
}

}  // namespace prony
