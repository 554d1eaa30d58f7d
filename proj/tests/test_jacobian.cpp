#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "prony/inverse.hpp"
#include "prony/jacobian.hpp"

using namespace prony;
using doctest::Approx;
using testing::random_nodes;
using testing::random_regular;

TEST_CASE("jacobian entries") {
  const DenseMatrix j = jacobian(Signal({0.5, 0.5}, {-1, 1}));
  DenseMatrix expected(4, 4);
  expected << 1, 1, 0, 0,
              -1, 1, 0.5, 0.5,
              1, 1, -1, 1,
              -1, 1, 1.5, 1.5;
  CHECK((j - expected).cwiseAbs().maxCoeff() == 0.0);

  const DenseMatrix j1 = jacobian(Signal({1.0}, {0.0}));
  CHECK(j1.isIdentity());
}

TEST_CASE("confluent vandermonde") {
  const std::vector<double> x1{0.7};
  DenseMatrix u = confluent_vandermonde(x1);
  CHECK(u(0, 0) == 1.0);
  CHECK(u(0, 1) == 0.0);
  CHECK(u(1, 0) == 0.7);
  CHECK(u(1, 1) == 1.0);

  const std::vector<double> x2{-1, 1};
  u = confluent_vandermonde(x2);
  CHECK(u(0, 3) == 0.0);
  CHECK(u(1, 3) == 1.0);
  CHECK(u(2, 3) == 2.0);
  CHECK(u(3, 3) == 3.0);
}

TEST_CASE("factorization and finite differences") {
  std::mt19937_64 gen(8);
  for (std::size_t d = 1; d <= 4; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const Signal g = random_regular(gen, d, 0.3, 0.5, 2.0);
      const DenseMatrix j = jacobian(g);
      DenseMatrix block = DenseMatrix::Identity(2 * d, 2 * d);
      for (std::size_t i = 0; i < d; ++i) block(d + i, d + i) = g.amplitudes()[i];
      CHECK(inf_norm(j - confluent_vandermonde(g.nodes()) * block) <= 1e-12 * inf_norm(j));

      const std::vector<double> p = g.parameters();
      const double step = 1e-6;
      for (std::size_t c = 0; c < 2 * d; ++c) {
        std::vector<double> hi = p, lo = p;
        hi[c] += step;
        lo[c] -= step;
        const MomentVector mh = compute_moments(Signal::from_parameters(hi), 2 * d);
        const MomentVector ml = compute_moments(Signal::from_parameters(lo), 2 * d);
        for (std::size_t k = 0; k < 2 * d; ++k) {
          const double fd = (mh[k] - ml[k]) / (2 * step);
          const double exact = j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
          CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));
        }
      }
    }
  }
}

TEST_CASE("matrix infinity norm") {
  CHECK(inf_norm(DenseMatrix::Identity(5, 5)) == 1.0);
  DenseMatrix a(2, 2);
  a << 1, -1, 2, 3;
  CHECK(inf_norm(a) == 5.0);
  CHECK(inf_norm(DenseMatrix::Zero(3, 3)) == 0.0);
  CHECK_THROWS_AS(inverse_inf_norm(DenseMatrix::Zero(2, 2)), std::domain_error);
}

TEST_CASE("gautschi bounds at hand-computed points") {
  const std::vector<double> x{-1, 1};
  CHECK(gautschi_vandermonde_bound(x) == 1.0);
  CHECK(inverse_inf_norm(vandermonde(x)) == Approx(1.0));
  CHECK(gautschi_confluent_bound(x) == 3.0);
  const std::vector<double> single{0.4};
  CHECK(gautschi_confluent_bound(single) == Approx(1.4));
  CHECK(gautschi_vandermonde_bound(single) == 1.0);
  const std::vector<double> dup{0.2, 0.2};
  CHECK_THROWS_AS(gautschi_vandermonde_bound(dup), std::domain_error);
  CHECK_THROWS_AS(gautschi_confluent_bound(dup), std::domain_error);
}

TEST_CASE("gautschi bounds dominate exact inverse norms") {
  std::mt19937_64 gen(99);
  for (std::size_t d = 2; d <= 4; ++d) {
    const RegularBounds rb = regular_bounds(0.05, d);
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<double> x = random_nodes(gen, d, 0.05);
      const double gv = gautschi_vandermonde_bound(x);
      const double gc = gautschi_confluent_bound(x);
      CHECK(gv * (1 + 1e-12) >= inverse_inf_norm(vandermonde(x)));
      CHECK(gc * (1 + 1e-12) >= inverse_inf_norm(confluent_vandermonde(x)));
      CHECK(rb.vandermonde * (1 + 1e-12) >= inverse_inf_norm(vandermonde(x)));
      CHECK(rb.confluent * (1 + 1e-12) >= inverse_inf_norm(confluent_vandermonde(x)));
    }
  }
}

TEST_CASE("regular bound fails at the interval edge for four nodes") {
  // Four nodes packed against x = 1 at the minimal gap. At eta = 0.5 only
  // the per-instance Gautschi value exceeds the node-independent bound; at
  // eta = 0.05 the exact inverse norm does too. C1 still holds in both.
  for (double eta : {0.5, 0.05}) {
    const std::vector<double> x{1 - 3 * eta, 1 - 2 * eta, 1 - eta, 1};
    const RegularBounds rb = regular_bounds(eta, 4);
    CHECK(gautschi_vandermonde_bound(x) > rb.vandermonde);
    const double exact = inverse_inf_norm(vandermonde(x));
    if (eta == 0.5) CHECK(exact <= rb.vandermonde);
    else CHECK(exact > 1.5 * rb.vandermonde);
    const Signal g({1, 1, 1, 1}, x);
    CHECK(inverse_inf_norm(jacobian(g)) <= compute_constants(4, {eta, 1.0, 2.0}, 0.0).C1);
  }
}

TEST_CASE("regular bounds closed forms") {
  const RegularBounds one = regular_bounds(0.5, 1);
  CHECK(one.vandermonde == 1.0);
  CHECK(one.confluent == Approx(1 + 4 / 0.5));
  CHECK(regular_bounds(1.0, 2).vandermonde == Approx(2.0));
  CHECK_THROWS(regular_bounds(0.0, 2));
}

TEST_CASE("constants bundle") {
  const ConstantsBundle c = compute_constants(2, {1.0, 0.5, 1.0}, 0.0);
  CHECK(c.C2 == 8.0);
  CHECK(c.C5 == 216.0);
  const double identity = c.R * 48 * c.C2 * c.C1 * 2 * (1.0 + 1.0) * 9;
  CHECK(std::abs(identity - 1.0) <= 1e-12);
  CHECK(c.C4 == 2 * c.C1);
  CHECK(c.C3 == Approx(2 * c.C1 / (1 + 2 * c.C1 * c.C2)));
  CHECK(c.r == Approx(1 / (4 * c.C5 * c.C1)));
  CHECK(c.K3.has_value());
  CHECK(c.C6 <= c.R);
  CHECK(c.C7 <= c.C6);

  const ConstantsBundle d1 = compute_constants(1, {1.0, 0.5, 1.0}, 0.0);
  CHECK_FALSE(d1.K3.has_value());
  CHECK_THROWS_AS(d1.k3(), std::domain_error);
  CHECK(d1.K4 > 0);

  CHECK_THROWS_AS(compute_constants(3, {1.5, 0.5, 1.0}, 0.0), std::domain_error);

  // C1 does not increase with eta or m.
  double prev_eta = INFINITY;
  for (double eta : {0.1, 0.2, 0.4, 0.8, 1.0}) {
    const double c1 = compute_constants(3, {eta, 0.5, 2.0}, 0.0).C1;
    CHECK(c1 <= prev_eta);
    prev_eta = c1;
  }
  double prev_m = INFINITY;
  for (double m : {0.1, 0.3, 0.6, 1.0, 1.5}) {
    const double c1 = compute_constants(3, {0.5, m, 2.0}, 0.0).C1;
    CHECK(c1 <= prev_m);
    prev_m = c1;
  }

  const ConstantsBundle shifted = compute_constants(2, {1.0, 0.5, 1.0}, 1.0);
  CHECK(*shifted.K3 == Approx(*c.K3 / 8.0));
}

TEST_CASE("jacobian norms against C1 and C2") {
  std::mt19937_64 gen(17);
  for (std::size_t d = 2; d <= 3; ++d) {
    const RegularityParams p{0.4, 0.5, 2.0};
    const ConstantsBundle c = compute_constants(d, p, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
      const Signal g = random_regular(gen, d, p.eta, p.m, p.M);
      const DenseMatrix j = jacobian(g);
      CHECK(inf_norm(j) <= c.C2);
      CHECK(inverse_inf_norm(j) <= c.C1);
    }
  }
}

TEST_CASE("inverse map is bi-Lipschitz on Q_R") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t d = 2;
  const RegularityParams p{1.0, 0.5, 2.0};
  const ConstantsBundle c = compute_constants(d, p, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Signal g = random_regular(gen, d, p.eta, p.m, p.M);
    const MomentVector nu = compute_moments(g, 2 * d);
    std::vector<double> v1(nu.values().begin(), nu.values().end()), v2 = v1;
    for (std::size_t k = 0; k < 2 * d; ++k) {
      v1[k] += c.R * u(gen);
      v2[k] += c.R * u(gen);
    }
    auto g1 = solve_prony(MomentVector(v1), d);
    auto g2 = solve_prony(MomentVector(v2), d);
    REQUIRE(g1.ok());
    REQUIRE(g2.ok());
    const double dm = inf_distance(v1, v2);
    const double dp = distance(*g1, *g2);
    CHECK(dp >= c.C3 * dm * (1 - 1e-6));
    CHECK(dp <= c.C4 * dm * (1 + 1e-6));
  }
}

TEST_CASE("remainder bound") {
  const ConstantsBundle c = compute_constants(2, {1.0, 0.5, 1.0}, 0.0);
  const Signal g({0.5, 0.5}, {-1, 1});
  const RemainderCheck same = remainder_bound_check(g, g, c);
  CHECK(same.holds);
  CHECK(same.remainder == 0.0);

  const Signal moved({0.501, 0.499}, {-0.999, 1.001});
  CHECK(remainder_bound_check(g, moved, c).holds);
  CHECK_THROWS_AS(remainder_bound_check(g, Signal({0.5, 0.5}, {-1, 1.5}), c), std::domain_error);

  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t d = 2; d <= 3; ++d) {
    const RegularityParams p{0.5, 0.5, 2.0};
    const ConstantsBundle k = compute_constants(d, p, 0.0);
    for (int trial = 0; trial < 200; ++trial) {
      const Signal base = random_regular(gen, d, p.eta, p.m, p.M);
      std::vector<double> q = base.parameters();
      const double size = std::pow(10.0, -1.0 - 3.0 * (u(gen) + 1.0) / 2.0) / static_cast<double>(2 * d - 1);
      for (double& v : q) v += size * u(gen);
      CHECK(remainder_bound_check(base, Signal::from_parameters(q), k).holds);
    }
  }
}
