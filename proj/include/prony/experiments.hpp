#ifndef PRONY_EXPERIMENTS_HPP
#define PRONY_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prony/serialize.hpp"
#include "prony/signal.hpp"

namespace prony {

/// eps per sweep cell: an explicit list (one value per h), or c * h^p with
/// p defaulting to 2d - 1.
struct EpsRule {
  std::vector<double> absolute;
  double c = 1.0;
  std::optional<double> p;

  double eps_for(std::size_t index, double h, std::size_t d) const;
};

struct ExperimentConfig {
  std::size_t d = 2;
  /// Number of clustered nodes; the remaining d - s nodes sit at kappa + 1,
  /// kappa + 2, ... with unit amplitude. 0 means all d nodes are clustered.
  std::size_t cluster_size = 0;
  /// Regularity bounds fed to the constants; unset means the bounds of the
  /// equispaced test cluster (eta = 2/(d-1), m = 1/d, M = 1).
  std::optional<RegularityParams> regularity;
  double kappa = 0.0;
  std::vector<double> h_list{0.05, 0.075, 0.1, 0.15, 0.2};
  EpsRule eps;
  std::size_t n_samples = 500;
  std::size_t leaf_samples = 2000;
  std::optional<std::size_t> leaf_q;  // defaults to 2d - 2
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  std::string format = "csv";
  double gamma = 1.2;
  bool gamma_tracks_h = false;  // gamma = 1 + h in each cell

  void validate() const;
  std::size_t clustered() const { return cluster_size == 0 ? d : cluster_size; }
  RegularityParams effective_regularity() const;
  /// Equal amplitudes 1/s on s equispaced nodes kappa + h * [-1, 1].
  Signal cluster(double h) const;
  double eps_at(std::size_t index) const { return eps.eps_for(index, h_list.at(index), d); }
  /// Per-cell seed derived from the master seed.
  std::uint64_t cell_seed(std::size_t index) const;
};

/// Applies the keys present in `j` on top of `cfg`.
void apply_config_json(ExperimentConfig& cfg, const Json& j);
Json to_json(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  std::string to_csv() const;
  Json to_json() const;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  std::string name;
  Json summary = Json::object();
  Table table;
  std::vector<Artifact> files;  // plot data, always CSV
  std::vector<std::string> warnings;
  bool passed = true;
};

ExperimentOutput run_error_set(const ExperimentConfig& cfg);
ExperimentOutput run_worst_case(const ExperimentConfig& cfg);
ExperimentOutput run_leaves(const ExperimentConfig& cfg);
ExperimentOutput run_improve(const ExperimentConfig& cfg);
/// Figures 1 and 2: error set and Prony curve at h = 0.1 / 0.05, eps = h^3.
/// Figure 3: constrained reconstruction at h = 0.05 with gamma = 6/5.
ExperimentOutput run_figure(int which, const ExperimentConfig& cfg);

/// Writes <name>.json (and <name>.csv for the csv format) plus the plot
/// files into `dir`; returns the written paths in order.
std::vector<std::string> write_outputs(const ExperimentOutput& out, const std::string& dir,
                                       const std::string& format);

}  // namespace prony

#endif  // PRONY_EXPERIMENTS_HPP
