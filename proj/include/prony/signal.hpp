#ifndef PRONY_SIGNAL_HPP
#define PRONY_SIGNAL_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prony {

/// Raised by cluster operations on signals with fewer than two distinct nodes.
class DegenerateCluster : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A spike train sum_j a_j delta(x - x_j).
///
/// Nodes are kept strictly increasing; the constructor sorts the (a, x) pairs
/// and rejects repeated nodes, so two signals built from permutations of the
/// same pairs compare equal.
class Signal {
 public:
  Signal(std::vector<double> amplitudes, std::vector<double> nodes);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> amplitudes() const { return amplitudes_; }
  std::span<const double> nodes() const { return nodes_; }

  /// Parameter vector (a_1..a_d, x_1..x_d).
  std::vector<double> parameters() const;
  static Signal from_parameters(std::span<const double> params);

  bool operator==(const Signal&) const = default;

 private:
  std::vector<double> amplitudes_;
  std::vector<double> nodes_;
};

/// Moments (m_0, ..., m_{K-1}).
class MomentVector {
 public:
  explicit MomentVector(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const { return values_; }

  bool operator==(const MomentVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Center and half-width of the node interval; defines Psi_{kappa,h}.
struct ClusterFrame {
  double kappa = 0.0;
  double h = 1.0;

  void validate() const;
};

/// (eta, m, M)-regularity: nodes in [-1, 1] with gaps >= eta and
/// m <= |a_j| <= M.
struct RegularityParams {
  double eta = 1.0;
  double m = 0.5;
  double M = 1.0;

  void validate() const;
};

struct RegularityReport {
  bool regular = true;
  std::vector<std::string> violations;

  explicit operator bool() const { return regular; }
};

struct ClusterRegularity {
  RegularityReport report;
  ClusterFrame frame;
};

// Distances in the maximum metric on parameter space.
double distance(const Signal& lhs, const Signal& rhs);
double amplitude_distance(const Signal& lhs, const Signal& rhs);
double node_distance(const Signal& lhs, const Signal& rhs);
double inf_norm(std::span<const double> v);
double inf_distance(std::span<const double> lhs, std::span<const double> rhs);

MomentVector compute_moments(const Signal& signal, std::size_t count);

/// SH*_kappa: the moment-space image of moving every node by -kappa.
MomentVector shift_moments(const MomentVector& mu, double kappa);
/// Row-major K x K matrix of SH*_kappa in the monomial basis.
std::vector<double> shift_matrix(double kappa, std::size_t count);
/// SC*_alpha: nu_k = alpha^k mu_k. Throws std::domain_error for alpha == 0.
MomentVector scale_moments(const MomentVector& mu, double alpha);

/// SH_kappa on signals: F(x + kappa), i.e. nodes x_j - kappa.
Signal shift_signal(const Signal& signal, double kappa);
/// SC_alpha on signals: nodes alpha * x_j.
Signal scale_signal(const Signal& signal, double alpha);

ClusterFrame cluster_frame(const Signal& signal);
/// Psi_{kappa,h} for a given frame (not necessarily the signal's own).
Signal to_model(const Signal& signal, const ClusterFrame& frame);
Signal denormalize(const Signal& model, const ClusterFrame& frame);

struct Normalized {
  Signal model;
  ClusterFrame frame;
};
Normalized normalize(const Signal& signal);

RegularityReport check_regular(const Signal& model, const RegularityParams& params);
ClusterRegularity check_regular_cluster(const Signal& signal, const RegularityParams& params);

/// Binomial coefficient C(n, k) for n < 64, exact.
double binomial(std::size_t n, std::size_t k);

}  // namespace prony

#endif  // PRONY_SIGNAL_HPP
