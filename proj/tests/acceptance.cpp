// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "prony/constrained.hpp"
#include "prony/experiments.hpp"
#include "prony/inverse.hpp"
#include "prony/jacobian.hpp"
#include "prony/leaf.hpp"

using namespace prony;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("AC%-2d %s  %s  (%.2fs%s)  %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), secs,
              in_time ? "" : ", over time limit", o.detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("     info: %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Ordinary least squares slope of log y against log x, written out by hand.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> column(const Table& t, const std::string& name) {
  std::size_t c = 0;
  while (c < t.columns.size() && t.columns[c] != name) ++c;
  if (c == t.columns.size()) throw std::runtime_error("missing column " + name);
  std::vector<double> v;
  for (const auto& row : t.rows) v.push_back(row[c].get<double>());
  return v;
}

std::vector<double> ratio(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] / b[i];
  return r;
}

bool near(double value, double target, double tol) { return std::abs(value - target) <= tol; }

const std::vector<double> kSweep{0.05, 0.075, 0.1, 0.15, 0.2};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PRONY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "round-trip inversion", 5.0, [] {
    std::mt19937_64 gen(1);
    double worst = 0.0;
    for (std::size_t d = 1; d <= 4; ++d)
      for (int t = 0; t < 200; ++t) {
        const Signal f = testing::random_regular(gen, d, 0.5, 0.5, 2.0);
        auto r = solve_prony(compute_moments(f, 2 * d), d);
        if (!r) return Outcome{false, "inversion failed: " + r.error().detail};
        worst = std::max(worst, distance(*r, f));
      }
    return Outcome{worst <= 1e-7, fmt("max error %.3g (tol 1e-7)", worst)};
  });

  criterion(2, "jacobian correctness", 5.0, [] {
    std::mt19937_64 gen(2);
    double fd_worst = 0.0, fact_worst = 0.0;
    for (std::size_t d = 2; d <= 3; ++d)
      for (int t = 0; t < 100; ++t) {
        const Signal g = testing::random_regular(gen, d, 0.5, 0.5, 2.0);
        const DenseMatrix j = jacobian(g);
        DenseMatrix block = DenseMatrix::Identity(2 * d, 2 * d);
        for (std::size_t i = 0; i < d; ++i) block(d + i, d + i) = g.amplitudes()[i];
        fact_worst = std::max(fact_worst, inf_norm(j - confluent_vandermonde(g.nodes()) * block) / inf_norm(j));
        const std::vector<double> p = g.parameters();
        for (std::size_t c = 0; c < 2 * d; ++c) {
          const double step = 1e-6;
          std::vector<double> hi = p, lo = p;
          hi[c] += step;
          lo[c] -= step;
          const MomentVector mh = compute_moments(Signal::from_parameters(hi), 2 * d);
          const MomentVector ml = compute_moments(Signal::from_parameters(lo), 2 * d);
          for (std::size_t k = 0; k < 2 * d; ++k) {
            const double exact = j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
            const double fd = (mh[k] - ml[k]) / (2 * step);
            fd_worst = std::max(fd_worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
          }
        }
      }
    return Outcome{fd_worst <= 1e-5 && fact_worst <= 1e-12,
                   fmt("finite-difference %.3g (tol 1e-5), factorization %.3g (tol 1e-12)", fd_worst, fact_worst)};
  });

  criterion(3, "shift and scale identities", 2.0, [] {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double op_worst = 0.0;
    for (std::size_t d = 1; d <= 4; ++d)
      for (int t = 0; t < 100; ++t) {
        const Signal f = testing::random_regular(gen, d, 0.5, 0.5, 2.0);
        const MomentVector mu = compute_moments(f, 2 * d);
        const double kappa = u(gen);
        const double alpha = u(gen) + 3.0;
        const MomentVector sh = shift_moments(mu, kappa);
        const MomentVector sc = scale_moments(mu, alpha);
        op_worst = std::max(op_worst, inf_distance(compute_moments(shift_signal(f, kappa), 2 * d).values(),
                                                   sh.values()) / (1.0 + inf_norm(sh.values())));
        op_worst = std::max(op_worst, inf_distance(compute_moments(scale_signal(f, alpha), 2 * d).values(),
                                                   sc.values()) / (1.0 + inf_norm(sc.values())));
      }
    double row_worst = 0.0;
    for (double kappa : {-2.0, -0.7, 0.0, 0.3, 1.0, 1.5}) {
      const std::size_t K = 8;
      const std::vector<double> m = shift_matrix(kappa, K);
      for (std::size_t k = 0; k < K; ++k) {
        double row = 0.0;
        for (std::size_t l = 0; l < K; ++l) row += std::abs(m[k * K + l]);
        const double expected = std::pow(1.0 + std::abs(kappa), static_cast<double>(k));
        row_worst = std::max(row_worst, std::abs(row - expected) / expected);
      }
    }
    return Outcome{op_worst <= 1e-9 && row_worst <= 1e-12,
                   fmt("operator identities %.3g (tol 1e-9), row sums %.3g (tol 1e-12)", op_worst, row_worst)};
  });

  criterion(4, "gautschi dominance", 10.0, [] {
    std::mt19937_64 gen(4);
    const double eta = 0.05;
    std::size_t violations = 0;
    double tightest = 0.0;
    for (std::size_t d = 2; d <= 4; ++d) {
      const RegularBounds rb = regular_bounds(eta, d);
      for (int t = 0; t < 100; ++t) {
        const std::vector<double> x = testing::random_nodes(gen, d, eta);
        const double gv = gautschi_vandermonde_bound(x), gc = gautschi_confluent_bound(x);
        const double ev = inverse_inf_norm(vandermonde(x)), ec = inverse_inf_norm(confluent_vandermonde(x));
        tightest = std::max(tightest, std::max(ev / gv, ec / gc));
        if (gv * (1 + 1e-12) < ev || gc * (1 + 1e-12) < ec) ++violations;
        if (rb.vandermonde * (1 + 1e-12) < gv || rb.confluent * (1 + 1e-12) < gc) ++violations;
      }
    }
    for (double edge_eta : {0.5, 0.05}) {
      const std::vector<double> edge{1 - 3 * edge_eta, 1 - 2 * edge_eta, 1 - edge_eta, 1};
      info(fmt("edge-packed d=4, eta=%.2f: per-instance bound %.4g, exact norm %.4g, regular bound %.4g", edge_eta,
               gautschi_vandermonde_bound(edge), inverse_inf_norm(vandermonde(edge)),
               regular_bounds(edge_eta, 4).vandermonde));
    }
    return Outcome{violations == 0, fmt("%.0f violations over 300 node sets, max exact/bound %.3f",
                                        static_cast<double>(violations), tightest)};
  });

  const Signal fig1({0.5, 0.5}, {-0.1, 0.1});
  const RegularityParams fig_params{2.0, 0.5, 1.0};

  criterion(5, "error set equals the parallelepiped (kappa = 0)", 10.0, [&] {
    const double h = 0.1, eps = std::pow(h, 3);
    const SandwichReport r = check_sandwich(fig1, eps, fig_params, 500, 5, 1e-6);
    return Outcome{r.ok() && r.outer_samples >= 516 && r.inner_samples >= 516,
                   fmt("outer ratio %.12f over %.0f, inner ratio %.12f over %.0f (slack 1e-6)", r.outer_worst_ratio,
                       static_cast<double>(r.outer_samples), r.inner_worst_ratio,
                       static_cast<double>(r.inner_samples))};
  });

  criterion(6, "sandwich inclusions (kappa = 1)", 10.0, [&] {
    const Signal shifted({0.5, 0.5}, {0.9, 1.1});
    const SandwichReport r = check_sandwich(shifted, 1e-3, fig_params, 500, 6, 1e-6);
    return Outcome{r.ok(), fmt("outer ratio %.6f, inner ratio %.6f, failed %.0f/%.0f", r.outer_worst_ratio,
                               r.inner_worst_ratio, static_cast<double>(r.outer_failed),
                               static_cast<double>(r.inner_failed))};
  });

  criterion(7, "error set concentrates on the Prony curve", 20.0, [&] {
    bool ok = true;
    std::string detail;
    for (double h : {0.05, 0.1}) {
      const Signal f({0.5, 0.5}, {-h, h});
      const NeighborhoodReport r = check_leaf_neighborhood(f, std::pow(h, 3), fig_params, 2, 500, 2000, 7);
      ok = ok && r.ok && r.worst_distance <= r.radius * (1 + 1e-3);
      detail += fmt("h=%.2f: %.4g / %.4g  ", h, r.worst_distance, r.radius);
    }
    return Outcome{ok, detail + "(distance / radius)"};
  });

  criterion(8, "worst-case scaling", 60.0, [] {
    ExperimentConfig cfg;
    cfg.h_list = kSweep;
    const ExperimentOutput out = run_worst_case(cfg);
    const auto h = column(out.table, "h"), eps = column(out.table, "eps");
    const double sx = log_slope(h, ratio(column(out.table, "rho_x"), eps));
    const double sa = log_slope(h, ratio(column(out.table, "rho_a"), eps));
    const double sr = log_slope(h, ratio(column(out.table, "rho"), eps));
    const bool slopes = near(sx, -2, 0.3) && near(sa, -3, 0.3) && near(sr, -3, 0.3);

    // The witness clause only binds for eps <= min(C6, C7) h^3.
    const ConstantsBundle k = compute_constants(2, cfg.effective_regularity(), 0.0);
    bool witness = true;
    double worst_margin = INFINITY;
    for (double hv : kSweep) {
      const double e = 0.5 * std::min(k.C6, k.C7) * std::pow(hv, 3);
      const Signal model = normalize(cfg.cluster(hv)).model;
      auto lb = construct_G_LB(model, e, hv);
      if (!lb) return Outcome{false, "G_LB construction failed"};
      const double bound = k.C3 * e * std::pow(hv, -3);
      witness = witness && distance(*lb, model) >= bound;
      worst_margin = std::min(worst_margin, distance(*lb, model) / bound);
    }
    return Outcome{slopes && witness, fmt("slopes rho_x %.3f, rho_a %.3f, rho %.3f; witness margin %.3g", sx, sa,
                                          sr, worst_margin)};
  });

  criterion(9, "partial cluster scaling", 60.0, [] {
    ExperimentConfig cfg;
    cfg.d = 3;
    cfg.cluster_size = 2;
    cfg.h_list = kSweep;
    cfg.eps.c = 0.1;
    cfg.eps.p = 3.0;
    const ExperimentOutput out = run_worst_case(cfg);
    const double sx = log_slope(column(out.table, "h"), ratio(column(out.table, "rho_x"), column(out.table, "eps")));
    return Outcome{near(sx, -2, 0.4), fmt("slope rho_x %.3f (target -2 +- 0.4)", sx)};
  });

  criterion(10, "leaf reconstruction accuracy", 60.0, [] {
    ExperimentConfig cfg;
    cfg.h_list = kSweep;
    const ExperimentOutput out = run_leaves(cfg);
    const double s = log_slope(column(out.table, "h"),
                               ratio(column(out.table, "parameter_distance"), column(out.table, "eps")));
    std::mt19937_64 gen(10);
    double formula = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Signal g = testing::random_regular(gen, 2, 0.5, 0.5, 2.0);
      const Signal gp = testing::random_regular(gen, 2, 0.5, 0.5, 2.0);
      const MomentVector a = compute_moments(g, 4), b = compute_moments(gp, 4);
      for (std::size_t q = 0; q < 4; ++q) {
        double expected = 0.0;
        for (std::size_t k = 0; k <= q; ++k) expected = std::max(expected, std::abs(a[k] - b[k]));
        formula = std::max(formula, std::abs(leaf_moment_hausdorff(g, gp, q) - expected));
      }
    }
    return Outcome{near(s, -2, 0.35) && formula <= 1e-10,
                   fmt("slope %.3f (target -2 +- 0.35), formula error %.3g", s, formula)};
  });

  criterion(11, "constrained improvement", 60.0, [] {
    const double h = 0.05, eps = std::pow(h, 3);
    const Signal truth({0.5, 0.5}, {-h, h});
    const MomentVector measured({1, 0, h * h, -eps});
    ImproveConfig ic;
    ic.eps = eps;
    ic.h_lower = h;
    ic.regularity = {2.0, 0.5, 1.0};
    ic.seed = 11;
    const AmplitudeRatioConstraint gamma{1.2};
    const ImprovedResult r = improved_reconstruct(measured, 2, gamma, ic);
    const double pe = node_distance(r.point_solution, truth), ie = node_distance(r.improved, truth);
    const bool figure = ie < pe && gamma(r.improved);

    ExperimentConfig cfg;
    cfg.h_list = kSweep;
    cfg.gamma_tracks_h = true;
    const ExperimentOutput out = run_improve(cfg);
    const auto hs = column(out.table, "h"), es = column(out.table, "eps");
    const double si = log_slope(hs, ratio(column(out.table, "improved_node_error"), es));
    const double sp = log_slope(hs, ratio(column(out.table, "point_node_error"), es));

    cfg.gamma_tracks_h = false;
    const ExperimentOutput fixed = run_improve(cfg);
    info(fmt("with gamma fixed at 6/5 over the sweep the improved slope is %.3f",
             log_slope(hs, ratio(column(fixed.table, "improved_node_error"), es))));
    return Outcome{figure && near(si, -1, 0.4) && near(sp, -2, 0.3),
                   fmt("h=0.05 node error %.4g -> %.4g; slopes improved %.3f, point %.3f", pe, ie, si, sp)};
  });

  criterion(12, "constants ledger", 5.0, [] {
    double identity = 0.0;
    for (std::size_t d = 2; d <= 4; ++d)
      for (double m : {0.25, 0.5}) {
        const RegularityParams p{0.5, m, 2.0};
        const ConstantsBundle c = compute_constants(d, p, 0.0);
        const double dd = static_cast<double>(d);
        const double expected = 1.0 / (48 * c.C2 * c.C1 * dd * (p.M + 1) * (2 * dd - 1) * (2 * dd - 1));
        identity = std::max(identity, std::abs(c.R - expected) / expected);
      }
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t failed = 0;
    for (std::size_t d = 2; d <= 3; ++d) {
      const RegularityParams p{0.5, 0.5, 2.0};
      const ConstantsBundle k = compute_constants(d, p, 0.0);
      for (int t = 0; t < 1000; ++t) {
        const Signal base = testing::random_regular(gen, d, p.eta, p.m, p.M);
        std::vector<double> q = base.parameters();
        const double size = std::pow(10.0, -1.0 - 3.0 * (u(gen) + 1.0) / 2.0) / static_cast<double>(2 * d - 1);
        for (double& v : q) v += size * u(gen);
        if (!remainder_bound_check(base, Signal::from_parameters(q), k).holds) ++failed;
      }
    }
    return Outcome{identity <= 1e-12 && failed == 0,
                   fmt("R identity %.3g (tol 1e-12), remainder failures %.0f/2000", identity,
                       static_cast<double>(failed))};
  });

  criterion(13, "determinism", 0.0, [] {
    const fs::path root = fs::temp_directory_path() / "prony_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::string> runs{"error-set --samples 200", "worst-case --samples 200", "leaves --leaf-samples 300",
                                        "improve --leaf-samples 300", "figures 3 --leaf-samples 300"};
    std::size_t files = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const fs::path a = root / ("a" + std::to_string(i)), b = root / ("b" + std::to_string(i));
      fs::create_directories(a);
      fs::create_directories(b);
      const int ca = run_cli(runs[i] + " --seed 13 --out " + a.string());
      const int cb = run_cli(runs[i] + " --seed 13 --out " + b.string());
      if (ca != cb || ca == 2 || ca == 3) return Outcome{false, runs[i] + ": exit codes " + std::to_string(ca) + ", " + std::to_string(cb)};
      for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
          return Outcome{false, runs[i] + ": " + entry.path().filename().string() + " differs"};
        ++files;
      }
    }
    fs::remove_all(root);
    return Outcome{files > 0, std::to_string(files) + " files byte-identical across reruns"};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", failures);
  return failures == 0 ? 0 : 1;
}
