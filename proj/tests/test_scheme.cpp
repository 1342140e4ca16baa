#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/scheme.hpp"

using namespace trunclap;

namespace {

ProblemSpec disk_problem(double h, SchemeConfig sc = {}, HamiltonianSpec H = {}, double mu = 0.0,
                         ScalarField f = ScalarField::constant(0.0)) {
  return ProblemSpec{DomainSpec::ball({0, 0}, 1), sc, std::move(H), mu, std::move(f), h};
}

template <class Fn>
std::vector<double> sample(const Discretization& d, Fn fn) {
  std::vector<double> u(d.size());
  for (std::size_t a = 0; a < u.size(); ++a) u[a] = fn(d.grid().active_position(a));
  return u;
}

bool full_stencil(const Grid& g, std::size_t a) {
  for (int d = 0; d < g.direction_count(); ++d)
    if (g.arm(a, d).neighbor < 0) return false;
  return true;
}

std::vector<std::size_t> full_nodes(const Grid& g) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < g.active_count(); ++a)
    if (full_stencil(g, a)) out.push_back(a);
  return out;
}

}  // namespace

TEST_CASE("cut second difference") {
  CHECK(cut_second_difference(0, 0, 1, 1, 1, 1) == doctest::Approx(1));
  CHECK(cut_second_difference(1, -2, 1, 1, 1, 1) == doctest::Approx(6));
  // exact on t^2 with a short right arm: nodes at -1, 0, 0.25
  CHECK(cut_second_difference(1, 0, 0.0625, 1, 0.25, 1) == doctest::Approx(2));
}

TEST_CASE("stencil set") {
  const auto st = StencilSet::make(2, 2, 1);
  CHECK(st.lines.size() == 8);
  CHECK(st.frames.size() == 8);
  const auto st2 = StencilSet::make(2, 2, 2);
  REQUIRE(st2.frames.size() == 1);
  CHECK(st2.frames[0] == std::vector<int>{0, 1});
  const auto st3 = StencilSet::make(3, 1, 2);
  CHECK(st3.frames.front() == std::vector<int>{0, 1});
  for (const auto& fr : st3.frames)
    for (std::size_t i = 0; i < fr.size(); ++i)
      for (std::size_t j = i + 1; j < fr.size(); ++j) {
        int dp = 0;
        for (int c = 0; c < 3; ++c) dp += st3.lines[fr[i]][c] * st3.lines[fr[j]][c];
        CHECK(dp == 0);
      }
  CHECK_THROWS_AS(StencilSet::make(2, 2, 3), InvalidInput);
}

TEST_CASE("second differences are exact on quadratics at full-stencil nodes") {
  std::mt19937_64 rng(4);
  const auto A = oracle::random_sym(2, rng);
  Discretization d(disk_problem(1.0 / 16));
  const auto u = sample(d, [&](const Point& x) { return 0.5 * A.quad(x) + 0.3 * x[0] - 1.0; });
  const auto full = full_nodes(d.grid());
  REQUIRE(full.size() > 100);
  for (std::size_t a : full)
    for (std::size_t l = 0; l < d.stencils().lines.size(); ++l)
      CHECK(d.second_diff(u, a, static_cast<int>(l)) ==
            doctest::Approx(A.quad(d.stencils().units[l])).epsilon(1e-9).scale(1.0));
  // constants
  const std::vector<double> c(d.size(), 3.0);
  for (std::size_t a : full) CHECK(d.second_diff(c, a, 2) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("apply_pk examples") {
  Discretization d(disk_problem(1.0 / 16));
  const auto full = full_nodes(d.grid());
  const auto half_r2 = sample(d, [](const Point& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
  const auto x1x2 = sample(d, [](const Point& x) { return x[0] * x[1]; });
  const auto aniso = sample(d, [](const Point& x) { return 0.5 * (2 * x[0] * x[0] + 7 * x[1] * x[1]); });
  for (std::size_t a : full) {
    CHECK(d.apply_pk(half_r2, a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.apply_pk(x1x2, a) == doctest::Approx(oracle::eig2x2(0, 1, 0).first).epsilon(1e-9));
    CHECK(d.apply_pk(aniso, a) == doctest::Approx(2.0).epsilon(1e-9));
  }
  // W = 1 already contains the diagonals (1, 1) and (1, -1)
  SchemeConfig w1;
  w1.width = 1;
  Discretization d1(disk_problem(1.0 / 16, w1));
  const auto v = sample(d1, [](const Point& x) { return x[0] * x[1]; });
  for (std::size_t a : full_nodes(d1.grid())) CHECK(d1.apply_pk(v, a) == doctest::Approx(-1.0).epsilon(1e-9));

  SchemeConfig plus;
  plus.sign = OperatorSign::Plus;
  Discretization dp(disk_problem(1.0 / 16, plus));
  const auto w = sample(dp, [](const Point& x) { return x[0] * x[1]; });
  for (std::size_t a : full_nodes(dp.grid())) CHECK(dp.apply_pk(w, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("k = N gives the five-point Laplacian") {
  SchemeConfig sc;
  sc.k = 2;
  Discretization d(disk_problem(1.0 / 16, sc));
  REQUIRE(d.stencils().frames.size() == 1);
  const auto u = sample(d, [](const Point& x) { return x[0] * x[0] + 3 * x[1] * x[1] + x[0] * x[1]; });
  for (std::size_t a : full_nodes(d.grid())) CHECK(d.apply_pk(u, a) == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("manufactured residual for |x|^2 - 1 vanishes at every node") {
  // the one-sided second difference is exact on quadratics that vanish on the boundary
  Discretization d(disk_problem(1.0 / 32, {}, {}, 0.0, ScalarField::constant(2.0)));
  const auto u = sample(d, [](const Point& x) { return x[0] * x[0] + x[1] * x[1] - 1.0; });
  std::vector<double> F(d.size());
  d.residual(u, F);
  for (std::size_t a = 0; a < F.size(); ++a) CHECK(std::abs(F[a]) <= 1e-9 * (1.0 + d.diag_bound(a) * 1e-4));
}

TEST_CASE("apply_full on affine and zero grid functions") {
  Discretization d(disk_problem(1.0 / 16, {}, {}, 5.0));
  const auto u = sample(d, [](const Point& x) { return 1.0 + 0.3 * x[0] - 0.2 * x[1]; });
  for (std::size_t a : full_nodes(d.grid())) CHECK(d.apply_full(u, a) == doctest::Approx(5.0 * u[a]).epsilon(1e-9));

  const std::vector<double> zero(d.size(), 0.0);
  for (const auto& H : {HamiltonianSpec::norm(ScalarField::constant(1), 1),
                        HamiltonianSpec::neg_norm(ScalarField::affine(0.5, {0.2, 0}), 1),
                        HamiltonianSpec::drift_field({ScalarField::constant(1), ScalarField::constant(-1)}, 2)}) {
    Discretization dz(disk_problem(1.0 / 16, {}, H, 3.0));
    for (std::size_t a = 0; a < dz.size(); a += 7) CHECK(dz.apply_full(zero, a) == 0.0);
  }
}

TEST_CASE("upwind gradient terms") {
  // u = x1 on full-stencil nodes: |grad u| = 1, so b |grad u| = b
  Discretization dn(disk_problem(1.0 / 16, {}, HamiltonianSpec::norm(ScalarField::constant(0.5), 0.5)));
  const auto u = sample(dn, [](const Point& x) { return x[0]; });
  for (std::size_t a : full_nodes(dn.grid())) CHECK(dn.apply_h(u, a) == doctest::Approx(0.5).epsilon(1e-9));
  Discretization dd(disk_problem(
      1.0 / 16, {}, HamiltonianSpec::drift_field({ScalarField::constant(2), ScalarField::constant(-1)}, 3)));
  const auto v = sample(dd, [](const Point& x) { return 3 * x[0] + x[1]; });
  for (std::size_t a : full_nodes(dd.grid())) CHECK(dd.apply_h(v, a) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("property: the scheme is monotone in neighbour values") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  struct Case {
    SchemeConfig sc;
    HamiltonianSpec H;
    double mu;
  };
  SchemeConfig plus;
  plus.sign = OperatorSign::Plus;
  SchemeConfig lap;
  lap.k = 2;
  SchemeConfig central;
  central.gradient = GradientScheme::CentralRegularized;
  const std::vector<Case> cases{
      {{}, HamiltonianSpec::zero(), 0.0},
      {{}, HamiltonianSpec::norm(ScalarField::trig(0.5, 0.3, 0, 2, 0), 0.8), -1.0},
      {plus, HamiltonianSpec::neg_norm(ScalarField::constant(0.7), 0.7), 2.0},
      {lap, HamiltonianSpec::drift_field({ScalarField::constant(1), ScalarField::affine(0, {0, 2})}, 3), 0.5},
      {central, HamiltonianSpec::norm(ScalarField::constant(0.5), 0.5), 0.0},
  };
  for (const auto& c : cases) {
    Discretization d(ProblemSpec{DomainSpec::ellipse({0, 0}, {1, 0.7}), c.sc, c.H, c.mu,
                                 ScalarField::constant(0.3), 1.0 / 16});
    std::vector<double> u(d.size());
    for (auto& v : u) v = g(rng);
    const double delta = 1e-3;
    for (std::size_t a = 0; a < d.size(); a += 5) {
      const double F0 = d.apply_full(u, a);
      for (int dir = 0; dir < d.grid().direction_count(); ++dir) {
        const int nb = d.grid().arm(a, dir).neighbor;
        if (nb < 0) continue;
        auto w = u;
        w[nb] += delta;
        CHECK(d.apply_full(w, a) >= F0 - 1e-9);
      }
      // slope in the centre value lies in [mu - diag_bound, mu]
      auto w = u;
      w[a] += delta;
      const double slope = (d.apply_full(w, a) - F0) / delta;
      CHECK(slope <= c.mu + 1e-6);
      CHECK(slope >= c.mu - d.diag_bound(a) * (1 + 1e-9) - 1e-6);
    }
  }
}

TEST_CASE("property: restricted frame minimum never undercuts the exact operator") {
  std::mt19937_64 rng(8);
  for (int w : {1, 2}) {
    SchemeConfig sc;
    sc.width = w;
    Discretization d(disk_problem(1.0 / 8, sc));
    const auto full = full_nodes(d.grid());
    REQUIRE(!full.empty());
    for (int t = 0; t < 50; ++t) {
      const auto A = oracle::random_sym(2, rng);
      const auto u = sample(d, [&](const Point& x) { return 0.5 * A.quad(x); });
      const double exact = oracle::pk_minus(A, 1);
      for (std::size_t a : full) CHECK(d.apply_pk(u, a) >= exact - 1e-9 * (1 + A.max_abs()));
    }
  }
}

TEST_CASE("property: rotated quadratics are resolved to the angular resolution") {
  SchemeConfig sc;
  sc.width = 3;
  Discretization d(disk_problem(1.0 / 16, sc));
  // half the widest angular gap between lines, i.e. the worst misalignment of an eigenvector
  std::vector<double> ang;
  for (const auto& e : d.stencils().lines) {
    double t = std::atan2(static_cast<double>(e[1]), static_cast<double>(e[0]));
    if (t < 0) t += std::numbers::pi;
    ang.push_back(t);
  }
  std::sort(ang.begin(), ang.end());
  double gap = std::numbers::pi - ang.back() + ang.front();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  const double dtheta = 0.5 * gap;

  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> lam(-3, 3);
  const auto full = full_nodes(d.grid());
  for (int t = 0; t < 40; ++t) {
    const auto Q = oracle::random_rotation(2, rng);
    double l1 = lam(rng), l2 = lam(rng);
    if (l1 > l2) std::swap(l1, l2);
    const Eigen::Matrix2d A = Q * Eigen::Vector2d(l1, l2).asDiagonal() * Q.transpose();
    const auto u = sample(d, [&](const Point& x) {
      const Eigen::Vector2d v(x[0], x[1]);
      return 0.5 * v.dot(A * v);
    });
    // <A e, e> = l1 + (l2 - l1) sin^2(angle to the l1 eigenvector)
    const double C = l2 - l1;
    for (std::size_t i = 0; i < full.size(); i += 11) {
      const double v = d.apply_pk(u, full[i]);
      CHECK(v >= l1 - 1e-9);
      CHECK(v <= l1 + C * dtheta * dtheta + 1e-9);
    }
  }
}

TEST_CASE("linear rows reproduce the scheme for the active policy") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (const auto& H : {HamiltonianSpec::zero(), HamiltonianSpec::norm(ScalarField::constant(0.5), 0.5),
                        HamiltonianSpec::neg_norm(ScalarField::constant(0.5), 0.5),
                        HamiltonianSpec::drift_field({ScalarField::constant(1), ScalarField::constant(-0.5)}, 1.2)}) {
    Discretization d(disk_problem(1.0 / 16, {}, H, 1.5, ScalarField::constant(0.7)));
    std::vector<double> u(d.size());
    for (auto& v : u) v = g(rng);
    const auto p = d.policy(u);
    std::vector<std::pair<int, double>> row;
    for (std::size_t a = 0; a < d.size(); a += 3) {
      row.clear();
      double s = d.linear_row(a, p.frame[a], p.grad[a], row) * u[a];
      for (auto [j, c] : row) {
        CHECK(c >= 0.0);
        s += c * u[j];
      }
      const double F = d.apply_full(u, a);
      CHECK(s + d.mu() * u[a] - d.forcing()[a] == doctest::Approx(F).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("3D k = 2 on diagonal quadratics") {
  SchemeConfig sc;
  sc.width = 1;
  sc.k = 2;
  Discretization d(ProblemSpec{DomainSpec::ball({0, 0, 0}, 1), sc, {}, 0, ScalarField::constant(0), 1.0 / 8});
  const auto u = sample(d, [](const Point& x) { return 0.5 * (3 * x[0] * x[0] - x[1] * x[1] + 2 * x[2] * x[2]); });
  for (std::size_t a : full_nodes(d.grid())) CHECK(d.apply_pk(u, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("configuration") {
  CHECK_THROWS_AS(Discretization(disk_problem(-1.0)), InvalidInput);
  SchemeConfig bad;
  bad.k = 3;
  CHECK_THROWS_AS(Discretization(disk_problem(0.1, bad)), InvalidInput);
  SchemeConfig central;
  central.gradient = GradientScheme::CentralRegularized;
  CHECK_FALSE(Discretization(disk_problem(0.1, central)).linearizable());
  CHECK(Discretization(disk_problem(0.1)).concave());
}
