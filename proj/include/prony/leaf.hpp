#ifndef PRONY_LEAF_HPP
#define PRONY_LEAF_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "prony/inverse.hpp"
#include "prony/jacobian.hpp"
#include "prony/rng.hpp"
#include "prony/signal.hpp"

namespace prony {

/// Thrown when no draw of a sampling run could be inverted.
class AllInversionsFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How a cloud point's generating moment vector was drawn.
enum class SampleMode {
  uniform,        // uniform in the eps-cube
  faces,          // one coordinate pinned to a face, the rest uniform
  corners,        // all 2^{2d} cube corners
  axis_extremes,  // one coordinate at +-eps, others unperturbed
  leaf,           // free moments of a Prony leaf
  thickened,      // leaf point with displaced nodes
};

const char* to_string(SampleMode mode);
SampleMode parse_sample_mode(const std::string& name);

struct CloudPoint {
  Signal signal;
  MomentVector source;  // the moment vector the point was inverted from
  SampleMode mode;
};

struct SampleCloud {
  std::vector<CloudPoint> points;
  std::uint64_t seed = 0;
  std::size_t attempted = 0;
  std::size_t failed = 0;

  double failure_fraction() const {
    return attempted == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(attempted);
  }
  void append(const SampleCloud& other);
};

/// Pi_{eps,alpha}(center): |m_k(G') - m_k(center)| <= eps * alpha^k, k < 2d.
struct Parallelepiped {
  Signal center;
  double epsilon;
  double alpha;

  void validate() const;
  /// eps * alpha^k for k = 0..2d-1.
  std::vector<double> half_widths() const;
};

/// max_k |m_k(G') - m_k(center)| / (eps alpha^k); <= 1 means inside.
double parallelepiped_ratio(const Signal& point, const Parallelepiped& box);
bool in_parallelepiped(const Signal& point, const Parallelepiped& box, double slack = 0.0);

/// S_q(mu): the first q + 1 moments are fixed; free_center holds reference
/// values for the remaining 2d - q - 1 moments.
struct LeafSpec {
  std::size_t d = 0;
  std::size_t q = 0;
  std::vector<double> fixed_moments;
  std::vector<double> free_center;

  static LeafSpec from_moments(const MomentVector& mu, std::size_t q);
  void validate() const;
  std::size_t free_count() const { return 2 * d - q - 1; }
};

Result<Signal> leaf_point(const LeafSpec& spec, std::span<const double> free_moments,
                          const InversionConfig& cfg = {});

/// Free moments drawn uniformly in free_center +- box. Draw i uses counters
/// derived from (seed, i) only, so two leaves sampled with the same seed and
/// box share their free-moment values.
SampleCloud sample_leaf(const LeafSpec& spec, std::span<const double> box, std::size_t n,
                        std::uint64_t seed, Execution exec = Execution::parallel,
                        const InversionConfig& cfg = {});

/// Finite sample of the error set E_eps(F): inversions of moment vectors in
/// the cube Q_eps(PM(F)). `n` is ignored by corners/axis_extremes.
SampleCloud sample_error_set(const Signal& signal, double eps, std::size_t n, std::uint64_t seed,
                             SampleMode mode, Execution exec = Execution::parallel,
                             const InversionConfig& cfg = {});

struct WorstCaseReport {
  double eps = 0.0;
  double rho = 0.0;
  double rho_a = 0.0;
  double rho_x = 0.0;
  std::optional<Signal> argmax_rho;
  std::optional<Signal> argmax_a;
  std::optional<Signal> argmax_x;
  std::size_t samples = 0;
  std::size_t failed = 0;
  std::uint64_t seed = 0;
};

/// Maxima of ||F'-F||, ||a'-a||, ||x'-x|| over corners, axis extremes and n
/// uniform draws of the eps-cube.
WorstCaseReport estimate_worst_case(const Signal& signal, double eps, std::size_t n,
                                    std::uint64_t seed, Execution exec = Execution::parallel,
                                    const InversionConfig& cfg = {});

/// The point of the Prony curve S_{2d-2}(G) whose last moment is raised by
/// eps' h^{-2d+1}.
Result<Signal> construct_G_LB(const Signal& model, double eps_prime, double h,
                              const InversionConfig& cfg = {});

/// Symmetric Hausdorff distance between two point sets.
enum class Metric { parameters, moments };
double hausdorff(std::span<const Signal> lhs, std::span<const Signal> rhs, Metric metric,
                 Execution exec = Execution::parallel);
/// max over `from` of the distance to the nearest point of `to`.
double directed_hausdorff(std::span<const Signal> from, std::span<const Signal> to, Metric metric,
                          Execution exec = Execution::parallel);

/// Hausdorff distance in the moment metric between S_q(G) and S_q(G'):
/// max_{k <= q} |m_k(G) - m_k(G')|.
double leaf_moment_hausdorff(const Signal& model, const Signal& perturbed, std::size_t q);

struct HausdorffEstimate {
  double parameter_distance = 0.0;  // sampled, inf-norm on (a, x)
  double moment_distance = 0.0;     // sampled, moment metric
  double moment_formula = 0.0;      // exact moment-metric value
  std::size_t lhs_samples = 0;
  std::size_t rhs_samples = 0;
};

/// Sampled Hausdorff distance between S_q(G) and S_q(G') clipped to
/// Pi_{eps,1/h'}(G). A lower estimate of the true distance.
HausdorffEstimate estimate_leaf_hausdorff(const Signal& model, const Signal& perturbed,
                                          std::size_t q, double eps, double h_prime,
                                          std::size_t n, std::uint64_t seed,
                                          Execution exec = Execution::parallel);

struct SandwichReport {
  ClusterFrame frame;
  double eps = 0.0;
  double eps_inner = 0.0;  // (1+|kappa|)^{-2d+1} eps
  double h_prime = 0.0;    // h / (1+|kappa|)
  bool regime_warning = false;  // eps > R h'^{2d-1}
  double outer_worst_ratio = 0.0;
  double inner_worst_ratio = 0.0;
  std::size_t outer_samples = 0;
  std::size_t inner_samples = 0;
  std::size_t outer_failed = 0;
  std::size_t inner_failed = 0;
  bool outer_ok = false;
  bool inner_ok = false;

  bool ok() const { return outer_ok && inner_ok; }
};

/// Checks Pi_{eps',1/h}(G) subset normalized E_eps(F) subset Pi_{eps,1/h'}(G)
/// on corners plus n uniform samples of each side.
SandwichReport check_sandwich(const Signal& signal, double eps, const RegularityParams& params,
                              std::size_t n, std::uint64_t seed, double slack = 1e-6,
                              Execution exec = Execution::parallel);

struct NeighborhoodReport {
  std::size_t q = 0;
  double radius = 0.0;          // C4 (1/h')^q eps
  double worst_distance = 0.0;  // max over the error set of the distance to the leaf
  std::size_t cloud_size = 0;
  std::size_t leaf_size = 0;
  bool ok = false;
};

/// Distance of the normalized error set to the sampled leaf part
/// S_{q,eps,1/h'}(G), compared with C4 (1/h')^q eps (1 + 1e-3).
NeighborhoodReport check_leaf_neighborhood(const Signal& signal, double eps,
                                           const RegularityParams& params, std::size_t q,
                                           std::size_t n_cloud, std::size_t n_leaf,
                                           std::uint64_t seed,
                                           Execution exec = Execution::parallel);

}  // namespace prony

#endif  // PRONY_LEAF_HPP
