// prony: command-line front end for the Prony inversion and error-set experiments.
//
// Exit codes: 0 success, 2 input error, 3 inversion failure,
// 4 containment or bound-check failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "prony/constrained.hpp"
#include "prony/experiments.hpp"
#include "prony/inverse.hpp"
#include "prony/jacobian.hpp"
#include "prony/serialize.hpp"

namespace {

using namespace prony;

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kInversionFailure = 3;
constexpr int kCheckFailure = 4;

Json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

struct ExperimentFlags {
  std::string config;
  double eta = 0, m = 0, M = 0;
  std::vector<CLI::Option*> regularity;
  CLI::Option* d = nullptr;
  CLI::Option* s = nullptr;
  CLI::Option* kappa = nullptr;
  CLI::Option* h = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* eps_c = nullptr;
  CLI::Option* eps_p = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* leaf_samples = nullptr;
  CLI::Option* q = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* gamma_tracks_h = nullptr;
  std::size_t d_v = 2, s_v = 0, samples_v = 0, leaf_samples_v = 0, q_v = 0;
  double kappa_v = 0, eps_c_v = 1, eps_p_v = 0, gamma_v = 1.2;
  std::vector<double> h_v, eps_v;
  std::uint64_t seed_v = 1;
  std::string out_v, format_v;
  bool gamma_tracks_h_v = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; flags override its values");
    d = app->add_option("--d", d_v, "number of spikes");
    s = app->add_option("--s", s_v, "number of clustered spikes (default d)");
    regularity.push_back(app->add_option("--eta", eta, "node separation bound"));
    regularity.push_back(app->add_option("--m", m, "amplitude lower bound"));
    regularity.push_back(app->add_option("--M", M, "amplitude upper bound"));
    kappa = app->add_option("--kappa", kappa_v, "cluster center");
    h = app->add_option("--h", h_v, "cluster half-widths to sweep");
    eps = app->add_option("--eps", eps_v, "noise levels, one per h");
    eps_c = app->add_option("--eps-c", eps_c_v, "eps = c * h^p: coefficient");
    eps_p = app->add_option("--eps-p", eps_p_v, "eps = c * h^p: exponent (default 2d-1)");
    samples = app->add_option("--samples", samples_v, "uniform samples per cell");
    leaf_samples = app->add_option("--leaf-samples", leaf_samples_v, "samples per leaf");
    q = app->add_option("--q", q_v, "leaf index (default 2d-2)");
    seed = app->add_option("--seed", seed_v, "master seed");
    out = app->add_option("--out", out_v, "output directory");
    format = app->add_option("--format", format_v, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    gamma = app->add_option("--gamma", gamma_v, "amplitude ratio bound (>= 1)");
    gamma_tracks_h = app->add_flag("--gamma-tracks-h", gamma_tracks_h_v, "use gamma = 1 + h per cell");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config.empty()) apply_config_json(c, read_json(config));
    if (*d) c.d = d_v;
    if (*s) c.cluster_size = s_v;
    if (*regularity[0] || *regularity[1] || *regularity[2]) {
      RegularityParams p = c.regularity.value_or(c.effective_regularity());
      if (*regularity[0]) p.eta = eta;
      if (*regularity[1]) p.m = m;
      if (*regularity[2]) p.M = M;
      c.regularity = p;
    }
    if (*kappa) c.kappa = kappa_v;
    if (*h) c.h_list = h_v;
    if (*eps) c.eps.absolute = eps_v;
    if (*eps_c) c.eps.c = eps_c_v;
    if (*eps_p) c.eps.p = eps_p_v;
    if (*samples) c.n_samples = samples_v;
    if (*leaf_samples) c.leaf_samples = leaf_samples_v;
    if (*q) c.leaf_q = q_v;
    if (*seed) c.seed = seed_v;
    if (*out) c.output_dir = out_v;
    if (*format) c.format = format_v;
    if (*gamma) c.gamma = gamma_v;
    if (*gamma_tracks_h) c.gamma_tracks_h = gamma_tracks_h_v;
    c.validate();
    return c;
  }
};

int report(const ExperimentOutput& out, const ExperimentConfig& cfg) {
  for (const std::string& w : out.warnings) std::cerr << "warning: " << w << '\n';
  for (const std::string& path : write_outputs(out, cfg.output_dir, cfg.format)) std::cout << path << '\n';
  std::cout << out.name << ": " << (out.passed ? "all checks passed" : "CHECK FAILED") << '\n';
  return out.passed ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prony inversion and error-set geometry for clustered spike trains"};
  app.set_help_flag("--help", "print this help and exit");  // -h is taken by the cluster width
  app.require_subcommand(1);

  std::string in_path = "-", out_path;
  auto* forward = app.add_subcommand("forward", "signal JSON -> 2d moments JSON");
  forward->add_option("--in", in_path, "signal file ('-' for stdin)");
  forward->add_option("--out", out_path, "output file (default stdout)");

  std::size_t solve_d = 0;
  auto* solve = app.add_subcommand("solve", "moments JSON -> signal JSON with residual");
  solve->add_option("--in", in_path, "moments file ('-' for stdin)");
  solve->add_option("--d", solve_d, "number of spikes (default: half the moment count)");
  solve->add_option("--out", out_path, "output file (default stdout)");

  std::size_t const_d = 2;
  RegularityParams const_params;
  double const_kappa = 0.0;
  bool no_k3 = false;
  auto* constants = app.add_subcommand("constants", "explicit stability constants");
  constants->add_option("--d", const_d, "number of spikes");
  constants->add_option("--eta", const_params.eta, "node separation bound");
  constants->add_option("--m", const_params.m, "amplitude lower bound");
  constants->add_option("--M", const_params.M, "amplitude upper bound");
  constants->add_option("--kappa", const_kappa, "cluster center");
  constants->add_flag("--no-k3", no_k3, "do not request K3 (needed for d = 1)");
  constants->add_option("--out", out_path, "output file (default stdout)");

  ExperimentFlags error_set_flags, worst_flags, leaves_flags, improve_flags, figure_flags;
  auto* error_set = app.add_subcommand("error-set", "error-set clouds with parallelepiped and leaf checks");
  error_set_flags.attach(error_set);
  auto* worst = app.add_subcommand("worst-case", "worst-case errors, bound checks and slope fits");
  worst_flags.attach(worst);
  auto* leaves = app.add_subcommand("leaves", "Hausdorff distance between perturbed Prony leaves");
  leaves_flags.attach(leaves);
  auto* improve = app.add_subcommand("improve", "constrained reconstruction under an amplitude ratio bound");
  improve_flags.attach(improve);
  int figure = 0;
  auto* figures = app.add_subcommand("figures", "plot data for figures 1, 2 and 3");
  figures->add_option("figure", figure, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  figure_flags.attach(figures);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*forward) {
      const Signal s = signal_from_json(read_json(in_path));
      write_text(out_path, dump(document(to_json(compute_moments(s, 2 * s.size())))));
      return kOk;
    }
    if (*solve) {
      const MomentVector mu = moments_from_json(read_json(in_path));
      const std::size_t d = solve_d == 0 ? mu.size() / 2 : solve_d;
      if (d == 0 || mu.size() != 2 * d) throw InputError("need exactly 2d moments");
      auto r = solve_prony(mu, d);
      if (!r) {
        std::cerr << "inversion failed: " << to_string(r.error().kind) << ": " << r.error().detail << '\n';
        return kInversionFailure;
      }
      Json payload = to_json(*r);
      payload["residual"] = moment_residual(mu, *r);
      write_text(out_path, dump(document(payload)));
      return kOk;
    }
    if (*constants) {
      const ConstantsBundle c = compute_constants(const_d, const_params, const_kappa);
      if (!no_k3) c.k3();
      write_text(out_path, dump(document(to_json(c))));
      return kOk;
    }
    if (*error_set) {
      const ExperimentConfig cfg = error_set_flags.resolve();
      return report(run_error_set(cfg), cfg);
    }
    if (*worst) {
      const ExperimentConfig cfg = worst_flags.resolve();
      return report(run_worst_case(cfg), cfg);
    }
    if (*leaves) {
      const ExperimentConfig cfg = leaves_flags.resolve();
      return report(run_leaves(cfg), cfg);
    }
    if (*improve) {
      const ExperimentConfig cfg = improve_flags.resolve();
      return report(run_improve(cfg), cfg);
    }
    if (*figures) {
      const ExperimentConfig cfg = figure_flags.resolve();
      return report(run_figure(figure, cfg), cfg);
    }
  } catch (const InversionFailure& e) {
    std::cerr << "inversion failed: " << e.what() << '\n';
    return kInversionFailure;
  } catch (const AllInversionsFailed& e) {
    std::cerr << "inversion failed: " << e.what() << '\n';
    return kInversionFailure;
  } catch (const EmptyFeasibleSet& e) {
    std::cerr << "reconstruction failed: " << e.what() << '\n';
    return kInversionFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
