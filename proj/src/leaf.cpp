#include "prony/leaf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prony/parallel.hpp"

namespace prony {

namespace {

// Inverts every source vector; failures are counted and dropped, survivors
// keep the order of `sources`.
SampleCloud invert_batch(const std::vector<MomentVector>& sources, std::size_t d, SampleMode mode,
                         std::uint64_t seed, Execution exec, const InversionConfig& cfg) {
  std::vector<std::optional<Signal>> solved(sources.size());
  for_each_index(sources.size(), exec, [&](std::size_t i) {
    auto r = solve_prony(sources[i], d, cfg);
    if (r) solved[i] = *r;
  });
  SampleCloud cloud;
  cloud.seed = seed;
  cloud.attempted = sources.size();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (solved[i])
      cloud.points.push_back({std::move(*solved[i]), sources[i], mode});
    else
      ++cloud.failed;
  }
  return cloud;
}

std::vector<double> offset(std::span<const double> base, std::span<const double> delta) {
  std::vector<double> v(base.begin(), base.end());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += delta[k];
  return v;
}

// Unit-cube perturbation directions for each sampling mode.
std::vector<std::vector<double>> cube_directions(std::size_t K, std::size_t n, SampleMode mode,
                                                 const CounterRng& rng) {
  std::vector<std::vector<double>> dirs;
  switch (mode) {
    case SampleMode::uniform:
      dirs.assign(n, std::vector<double>(K));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < K; ++k) dirs[i][k] = rng.uniform(i * K + k, -1.0, 1.0);
      break;
    case SampleMode::faces:
      dirs.assign(n, std::vector<double>(K));
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t base = i * (K + 1);
        for (std::size_t k = 0; k < K; ++k) dirs[i][k] = rng.uniform(base + k, -1.0, 1.0);
        const std::uint64_t face = rng.bits(base + K) % (2 * K);
        dirs[i][face / 2] = (face % 2 == 0) ? 1.0 : -1.0;
      }
      break;
    case SampleMode::corners: {
      if (K >= 31) throw std::domain_error("sample_error_set: too many corners");
      const std::size_t count = std::size_t{1} << K;
      dirs.assign(count, std::vector<double>(K));
      for (std::size_t c = 0; c < count; ++c)
        for (std::size_t k = 0; k < K; ++k) dirs[c][k] = ((c >> k) & 1U) ? 1.0 : -1.0;
      break;
    }
    case SampleMode::axis_extremes:
      dirs.assign(2 * K, std::vector<double>(K, 0.0));
      for (std::size_t k = 0; k < K; ++k) {
        dirs[2 * k][k] = 1.0;
        dirs[2 * k + 1][k] = -1.0;
      }
      break;
    default:
      throw std::invalid_argument("sample_error_set: mode is not a cube sampling mode");
  }
  return dirs;
}

std::vector<MomentVector> box_sources(std::span<const double> center,
                                      const std::vector<std::vector<double>>& dirs,
                                      std::span<const double> half_widths) {
  std::vector<MomentVector> sources;
  sources.reserve(dirs.size());
  std::vector<double> delta(center.size());
  for (const auto& dir : dirs) {
    for (std::size_t k = 0; k < center.size(); ++k) delta[k] = dir[k] * half_widths[k];
    sources.emplace_back(offset(center, delta));
  }
  return sources;
}

std::vector<std::vector<double>> features(std::span<const Signal> points, Metric metric) {
  std::vector<std::vector<double>> f;
  f.reserve(points.size());
  for (const Signal& s : points) {
    if (metric == Metric::parameters) {
      f.push_back(s.parameters());
    } else {
      const MomentVector m = compute_moments(s, 2 * s.size());
      f.emplace_back(m.values().begin(), m.values().end());
    }
  }
  return f;
}

double directed(const std::vector<std::vector<double>>& from,
                const std::vector<std::vector<double>>& to, Execution exec) {
  if (from.empty()) return 0.0;
  if (to.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> nearest(from.size());
  for_each_index(from.size(), exec, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : to) best = std::min(best, inf_distance(from[i], t));
    nearest[i] = best;
  });
  return *std::max_element(nearest.begin(), nearest.end());
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be positive");
}

std::vector<double> power_widths(double eps, double alpha, std::size_t K) {
  std::vector<double> w(K);
  double power = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    w[k] = eps * power;
    power *= alpha;
  }
  return w;
}

}  // namespace

const char* to_string(SampleMode mode) {
  switch (mode) {
    case SampleMode::uniform: return "uniform";
    case SampleMode::faces: return "faces";
    case SampleMode::corners: return "corners";
    case SampleMode::axis_extremes: return "axis_extremes";
    case SampleMode::leaf: return "leaf";
    case SampleMode::thickened: return "thickened";
  }
  return "unknown";
}

SampleMode parse_sample_mode(const std::string& name) {
  for (SampleMode m : {SampleMode::uniform, SampleMode::faces, SampleMode::corners,
                       SampleMode::axis_extremes, SampleMode::leaf, SampleMode::thickened})
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown sample mode '" + name + "'");
}

void SampleCloud::append(const SampleCloud& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  attempted += other.attempted;
  failed += other.failed;
}

void Parallelepiped::validate() const {
  require_positive(epsilon, "Parallelepiped epsilon");
  require_positive(alpha, "Parallelepiped alpha");
}

std::vector<double> Parallelepiped::half_widths() const {
  return power_widths(epsilon, alpha, 2 * center.size());
}

double parallelepiped_ratio(const Signal& point, const Parallelepiped& box) {
  box.validate();
  if (point.size() != box.center.size())
    throw std::invalid_argument("parallelepiped_ratio: dimension mismatch");
  const std::size_t K = 2 * point.size();
  const MomentVector m = compute_moments(point, K);
  const MomentVector c = compute_moments(box.center, K);
  const std::vector<double> w = box.half_widths();
  double ratio = 0.0;
  for (std::size_t k = 0; k < K; ++k) ratio = std::max(ratio, std::abs(m[k] - c[k]) / w[k]);
  return ratio;
}

bool in_parallelepiped(const Signal& point, const Parallelepiped& box, double slack) {
  if (slack < 0.0) throw std::domain_error("in_parallelepiped: slack must be nonnegative");
  return parallelepiped_ratio(point, box) <= 1.0 + slack;
}

LeafSpec LeafSpec::from_moments(const MomentVector& mu, std::size_t q) {
  if (mu.size() % 2 != 0) throw std::invalid_argument("LeafSpec: need 2d moments");
  if (q >= mu.size()) throw std::domain_error("LeafSpec: q must lie in [0, 2d-1]");
  LeafSpec spec;
  spec.d = mu.size() / 2;
  spec.q = q;
  spec.fixed_moments.assign(mu.values().begin(), mu.values().begin() + static_cast<std::ptrdiff_t>(q + 1));
  spec.free_center.assign(mu.values().begin() + static_cast<std::ptrdiff_t>(q + 1), mu.values().end());
  return spec;
}

void LeafSpec::validate() const {
  if (d == 0 || q >= 2 * d) throw std::domain_error("LeafSpec: q must lie in [0, 2d-1]");
  if (fixed_moments.size() != q + 1)
    throw std::invalid_argument("LeafSpec: fixed_moments must hold q+1 values");
  if (free_center.size() != free_count())
    throw std::invalid_argument("LeafSpec: free_center must hold 2d-q-1 values");
}

Result<Signal> leaf_point(const LeafSpec& spec, std::span<const double> free_moments,
                          const InversionConfig& cfg) {
  spec.validate();
  if (free_moments.size() != spec.free_count())
    throw std::invalid_argument("leaf_point: wrong number of free moments");
  std::vector<double> mu(spec.fixed_moments);
  mu.insert(mu.end(), free_moments.begin(), free_moments.end());
  return solve_prony(MomentVector(std::move(mu)), spec.d, cfg);
}

SampleCloud sample_leaf(const LeafSpec& spec, std::span<const double> box, std::size_t n,
                        std::uint64_t seed, Execution exec, const InversionConfig& cfg) {
  spec.validate();
  const std::size_t free = spec.free_count();
  if (box.size() != free) throw std::invalid_argument("sample_leaf: box size must equal 2d-q-1");
  for (double b : box)
    if (!(b >= 0.0)) throw std::domain_error("sample_leaf: box half-widths must be nonnegative");

  const CounterRng rng(seed);
  std::vector<MomentVector> sources;
  sources.reserve(n);
  std::vector<double> mu(2 * spec.d);
  std::copy(spec.fixed_moments.begin(), spec.fixed_moments.end(), mu.begin());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < free; ++k)
      mu[spec.q + 1 + k] = spec.free_center[k] + box[k] * rng.uniform(i * free + k, -1.0, 1.0);
    sources.emplace_back(mu);
  }
  SampleCloud cloud = invert_batch(sources, spec.d, SampleMode::leaf, seed, exec, cfg);
  if (n > 0 && cloud.points.empty())
    throw AllInversionsFailed("sample_leaf: every leaf draw failed to invert");
  return cloud;
}

SampleCloud sample_error_set(const Signal& signal, double eps, std::size_t n, std::uint64_t seed,
                             SampleMode mode, Execution exec, const InversionConfig& cfg) {
  require_positive(eps, "sample_error_set: eps");
  const std::size_t d = signal.size();
  const std::size_t K = 2 * d;
  const MomentVector mu = compute_moments(signal, K);
  const auto dirs = cube_directions(K, n, mode, CounterRng(seed));
  const std::vector<double> widths(K, eps);
  SampleCloud cloud = invert_batch(box_sources(mu.values(), dirs, widths), d, mode, seed, exec, cfg);
  if (cloud.attempted > 0 && cloud.points.empty())
    throw AllInversionsFailed("sample_error_set: every draw failed; eps is beyond the regular regime");
  return cloud;
}

WorstCaseReport estimate_worst_case(const Signal& signal, double eps, std::size_t n,
                                    std::uint64_t seed, Execution exec,
                                    const InversionConfig& cfg) {
  SampleCloud cloud = sample_error_set(signal, eps, 0, seed, SampleMode::corners, exec, cfg);
  cloud.append(sample_error_set(signal, eps, 0, seed, SampleMode::axis_extremes, exec, cfg));
  if (n > 0) cloud.append(sample_error_set(signal, eps, n, seed, SampleMode::uniform, exec, cfg));

  WorstCaseReport report;
  report.eps = eps;
  report.seed = seed;
  report.samples = cloud.points.size();
  report.failed = cloud.failed;
  for (const CloudPoint& p : cloud.points) {
    const double ea = amplitude_distance(p.signal, signal);
    const double ex = node_distance(p.signal, signal);
    const double e = std::max(ea, ex);
    if (!report.argmax_rho || e > report.rho) {
      report.rho = e;
      report.argmax_rho = p.signal;
    }
    if (!report.argmax_a || ea > report.rho_a) {
      report.rho_a = ea;
      report.argmax_a = p.signal;
    }
    if (!report.argmax_x || ex > report.rho_x) {
      report.rho_x = ex;
      report.argmax_x = p.signal;
    }
  }
  return report;
}

Result<Signal> construct_G_LB(const Signal& model, double eps_prime, double h,
                              const InversionConfig& cfg) {
  require_positive(h, "construct_G_LB: h");
  if (!(eps_prime >= 0.0)) throw std::domain_error("construct_G_LB: eps' must be nonnegative");
  const std::size_t K = 2 * model.size();
  const MomentVector nu = compute_moments(model, K);
  std::vector<double> raised(nu.values().begin(), nu.values().end());
  raised.back() += eps_prime * std::pow(h, -static_cast<double>(K - 1));
  return solve_prony(MomentVector(std::move(raised)), model.size(), cfg);
}

double directed_hausdorff(std::span<const Signal> from, std::span<const Signal> to, Metric metric,
                          Execution exec) {
  return directed(features(from, metric), features(to, metric), exec);
}

double hausdorff(std::span<const Signal> lhs, std::span<const Signal> rhs, Metric metric,
                 Execution exec) {
  const auto a = features(lhs, metric);
  const auto b = features(rhs, metric);
  return std::max(directed(a, b, exec), directed(b, a, exec));
}

double leaf_moment_hausdorff(const Signal& model, const Signal& perturbed, std::size_t q) {
  const std::size_t K = 2 * model.size();
  if (perturbed.size() != model.size()) throw std::invalid_argument("leaf_moment_hausdorff: d mismatch");
  if (q >= K) throw std::domain_error("leaf_moment_hausdorff: q must lie in [0, 2d-1]");
  const MomentVector m = compute_moments(model, K);
  const MomentVector mp = compute_moments(perturbed, K);
  double r = 0.0;
  for (std::size_t k = 0; k <= q; ++k) r = std::max(r, std::abs(m[k] - mp[k]));
  return r;
}

HausdorffEstimate estimate_leaf_hausdorff(const Signal& model, const Signal& perturbed,
                                          std::size_t q, double eps, double h_prime,
                                          std::size_t n, std::uint64_t seed, Execution exec) {
  require_positive(eps, "estimate_leaf_hausdorff: eps");
  require_positive(h_prime, "estimate_leaf_hausdorff: h'");
  const std::size_t d = model.size();
  const std::size_t K = 2 * d;
  if (q >= K) throw std::domain_error("estimate_leaf_hausdorff: q must lie in [0, 2d-1]");

  const Parallelepiped box{model, eps, 1.0 / h_prime};
  const std::vector<double> widths = box.half_widths();
  const std::vector<double> free_box(widths.begin() + static_cast<std::ptrdiff_t>(q + 1), widths.end());

  const MomentVector nu = compute_moments(model, K);
  LeafSpec lhs_spec = LeafSpec::from_moments(nu, q);
  LeafSpec rhs_spec = LeafSpec::from_moments(compute_moments(perturbed, K), q);
  rhs_spec.free_center = lhs_spec.free_center;  // both leaves are swept over the same box

  auto clipped = [&](const LeafSpec& spec) {
    const std::size_t draws = spec.free_count() == 0 ? 1 : n;
    SampleCloud cloud = sample_leaf(spec, free_box, draws, seed, exec);
    std::vector<Signal> kept;
    for (const CloudPoint& p : cloud.points)
      if (in_parallelepiped(p.signal, box, 1e-9)) kept.push_back(p.signal);
    return kept;
  };
  const std::vector<Signal> lhs = clipped(lhs_spec);
  const std::vector<Signal> rhs = clipped(rhs_spec);

  HausdorffEstimate est;
  est.lhs_samples = lhs.size();
  est.rhs_samples = rhs.size();
  est.moment_formula = leaf_moment_hausdorff(model, perturbed, q);
  if (lhs.empty() || rhs.empty())
    throw AllInversionsFailed("estimate_leaf_hausdorff: a clipped leaf is empty");
  est.parameter_distance = hausdorff(lhs, rhs, Metric::parameters, exec);
  est.moment_distance = hausdorff(lhs, rhs, Metric::moments, exec);
  return est;
}

SandwichReport check_sandwich(const Signal& signal, double eps, const RegularityParams& params,
                              std::size_t n, std::uint64_t seed, double slack, Execution exec) {
  require_positive(eps, "check_sandwich: eps");
  const std::size_t d = signal.size();
  const std::size_t K = 2 * d;
  const auto [model, frame] = normalize(signal);
  const double shift_gain = 1.0 + std::abs(frame.kappa);

  SandwichReport report;
  report.frame = frame;
  report.eps = eps;
  report.eps_inner = eps * std::pow(shift_gain, -static_cast<double>(K - 1));
  report.h_prime = frame.h / shift_gain;
  const ConstantsBundle constants = compute_constants(d, params, frame.kappa);
  report.regime_warning = eps > constants.R * std::pow(report.h_prime, static_cast<double>(K - 1));

  // Outer: normalized error-set samples against Pi_{eps,1/h'}(G).
  SampleCloud outer = sample_error_set(signal, eps, 0, seed, SampleMode::corners, exec);
  outer.append(sample_error_set(signal, eps, n, seed, SampleMode::uniform, exec));
  const Parallelepiped outer_box{model, eps, 1.0 / report.h_prime};
  std::vector<double> ratios(outer.points.size());
  for_each_index(outer.points.size(), exec, [&](std::size_t i) {
    ratios[i] = parallelepiped_ratio(to_model(outer.points[i].signal, frame), outer_box);
  });
  report.outer_samples = outer.points.size();
  report.outer_failed = outer.failed;
  report.outer_worst_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  report.outer_ok = report.outer_failed == 0 && report.outer_worst_ratio <= 1.0 + slack;

  // Inner: Pi_{eps',1/h}(G) samples, mapped back to F-space, against Q_eps(mu).
  const MomentVector nu = compute_moments(model, K);
  const MomentVector mu = compute_moments(signal, K);
  const std::vector<double> widths = power_widths(report.eps_inner, 1.0 / frame.h, K);
  const CounterRng inner_rng = CounterRng(seed).substream(1);
  auto dirs = cube_directions(K, 0, SampleMode::corners, inner_rng);
  const auto uniform = cube_directions(K, n, SampleMode::uniform, inner_rng);
  dirs.insert(dirs.end(), uniform.begin(), uniform.end());
  const SampleCloud inner =
      invert_batch(box_sources(nu.values(), dirs, widths), d, SampleMode::uniform, seed, exec, {});
  std::vector<double> inner_ratios(inner.points.size());
  for_each_index(inner.points.size(), exec, [&](std::size_t i) {
    const Signal back = denormalize(inner.points[i].signal, frame);
    inner_ratios[i] = inf_distance(compute_moments(back, K).values(), mu.values()) / eps;
  });
  report.inner_samples = inner.points.size();
  report.inner_failed = inner.failed;
  report.inner_worst_ratio =
      inner_ratios.empty() ? 0.0 : *std::max_element(inner_ratios.begin(), inner_ratios.end());
  report.inner_ok = report.inner_failed == 0 && report.inner_samples > 0 &&
                    report.inner_worst_ratio <= 1.0 + slack;
  return report;
}

NeighborhoodReport check_leaf_neighborhood(const Signal& signal, double eps,
                                           const RegularityParams& params, std::size_t q,
                                           std::size_t n_cloud, std::size_t n_leaf,
                                           std::uint64_t seed, Execution exec) {
  require_positive(eps, "check_leaf_neighborhood: eps");
  const std::size_t d = signal.size();
  const std::size_t K = 2 * d;
  if (q >= K) throw std::domain_error("check_leaf_neighborhood: q must lie in [0, 2d-1]");
  const auto [model, frame] = normalize(signal);
  const double h_prime = frame.h / (1.0 + std::abs(frame.kappa));
  const ConstantsBundle constants = compute_constants(d, params, frame.kappa);

  SampleCloud cloud = sample_error_set(signal, eps, 0, seed, SampleMode::corners, exec);
  cloud.append(sample_error_set(signal, eps, n_cloud, seed, SampleMode::uniform, exec));
  std::vector<Signal> normalized;
  normalized.reserve(cloud.points.size());
  for (const CloudPoint& p : cloud.points) normalized.push_back(to_model(p.signal, frame));

  const std::vector<double> widths = power_widths(eps, 1.0 / h_prime, K);
  const LeafSpec spec = LeafSpec::from_moments(compute_moments(model, K), q);
  const std::span<const double> free_box(widths.data() + q + 1, widths.size() - q - 1);
  const std::size_t draws = spec.free_count() == 0 ? 1 : n_leaf;
  const SampleCloud leaf = sample_leaf(spec, free_box, draws, CounterRng(seed).substream(2).stream(), exec);
  std::vector<Signal> leaf_points;
  leaf_points.reserve(leaf.points.size());
  for (const CloudPoint& p : leaf.points) leaf_points.push_back(p.signal);

  NeighborhoodReport report;
  report.q = q;
  report.radius = constants.C4 * std::pow(1.0 / h_prime, static_cast<double>(q)) * eps;
  report.cloud_size = normalized.size();
  report.leaf_size = leaf_points.size();
  report.worst_distance = directed_hausdorff(normalized, leaf_points, Metric::parameters, exec);
  report.ok = cloud.failed == 0 && report.worst_distance <= report.radius * (1.0 + 1e-3);
  return report;
}

}  // namespace prony
