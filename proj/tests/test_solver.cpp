#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "trunclap/analytic.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/solver.hpp"

using namespace trunclap;

namespace {

ProblemSpec disk(double h, double f, double mu = 0.0, HamiltonianSpec H = {}, SchemeConfig sc = {}) {
  return ProblemSpec{DomainSpec::ball({0, 0}, 1), sc, std::move(H), mu, ScalarField::constant(f), h};
}

double max_error(const GridField& u, const std::function<double(std::span<const double>)>& exact) {
  double e = 0.0;
  for (std::size_t a = 0; a < u.values.size(); ++a)
    e = std::max(e, std::abs(u.values[a] - exact(u.grid->active_position(a))));
  return e;
}

double min_value(const GridField& u) { return *std::min_element(u.values.begin(), u.values.end()); }
double max_value(const GridField& u) { return *std::max_element(u.values.begin(), u.values.end()); }

}  // namespace

TEST_CASE("f = 2 recovers |x|^2 - 1") {
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const auto r = solve_dirichlet(disk(h, 2.0));
    REQUIRE(r.status == SolveStatus::Converged);
    CHECK(r.residual <= 1e-8);
    CHECK(max_error(r.u, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 1.0; }) <= 0.05);
  }
}

TEST_CASE("f = 0 gives the zero solution") {
  const auto r = solve_dirichlet(disk(1.0 / 16, 0.0, 0.0, HamiltonianSpec::norm(ScalarField::constant(0.5), 0.5)));
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.sup_norm <= 1e-12);
}

TEST_CASE("mu above the principal eigenvalue with f = 1 does not yield a valid solution") {
  const auto r = solve_dirichlet(disk(1.0 / 16, 1.0, 10.0));
  const bool sign_violation = r.status == SolveStatus::Converged && max_value(r.u) > 1e-8;
  CHECK((r.status != SolveStatus::Converged || sign_violation));
}

TEST_CASE("maximum principle for mu = 5 and f = -1") {
  const auto r = solve_dirichlet(disk(1.0 / 32, -1.0, 5.0));
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(min_value(r.u) >= -1e-8);
}

TEST_CASE("f = -1 well above the eigenvalue: large nonnegative solutions that shrink under refinement") {
  SolveOptions opt;
  opt.blowup_norm = 1e200;
  std::vector<double> sup;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const auto r = solve_dirichlet(disk(h, -1.0, 30.0), opt);
    REQUIRE(r.status == SolveStatus::Converged);
    CHECK(min_value(r.u) >= -1e-8);
    sup.push_back(r.sup_norm);
  }
  CHECK(sup[0] > 1e6);
  CHECK(sup[1] < sup[0]);
}

TEST_CASE("property: f <= 0 gives u >= 0 below the eigenvalue") {
  for (double mu : {0.0, 1.0, 2.0})
    for (const auto& H : {HamiltonianSpec::zero(), HamiltonianSpec::norm(ScalarField::constant(0.3), 0.3),
                          HamiltonianSpec::neg_norm(ScalarField::constant(0.3), 0.3)}) {
      ProblemSpec p{DomainSpec::ellipse({0, 0}, {1, 0.8}), {}, H, mu, ScalarField::trig(-1, 0.5, 0, 3, 0), 1.0 / 16};
      const auto r = solve_dirichlet(p);
      REQUIRE(r.status == SolveStatus::Converged);
      CHECK(min_value(r.u) >= -1e-8);
    }
}

TEST_CASE("property: comparison f1 <= f2 implies u1 >= u2") {
  Discretization d(disk(1.0 / 16, 0.0, 1.0, HamiltonianSpec::norm(ScalarField::constant(0.4), 0.4)));
  d.set_forcing(ScalarField::constant(1.0));
  const auto u1 = solve_dirichlet(d);
  d.set_forcing(ScalarField::trig(1.5, 0.5, 1, 2, 0.3));
  const auto u2 = solve_dirichlet(d);
  REQUIRE(u1.status == SolveStatus::Converged);
  REQUIRE(u2.status == SolveStatus::Converged);
  for (std::size_t a = 0; a < d.size(); ++a) CHECK(u1.u.values[a] >= u2.u.values[a] - 1e-9);
}

TEST_CASE("explicit stepping and policy iteration agree") {
  for (const auto& H : {HamiltonianSpec::zero(), HamiltonianSpec::norm(ScalarField::constant(0.5), 0.5)}) {
    Discretization d(disk(1.0 / 8, 2.0, 0.5, H));
    SolveOptions pe;
    pe.method = SolveMethod::Policy;
    SolveOptions ex;
    ex.method = SolveMethod::Explicit;
    ex.tol = 1e-10;
    const auto a = solve_dirichlet(d, pe);
    const auto b = solve_dirichlet(d, ex);
    REQUIRE(a.status == SolveStatus::Converged);
    REQUIRE(b.status == SolveStatus::Converged);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(a.u.values[i] == doctest::Approx(b.u.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("the central-regularized variant is solved by explicit stepping") {
  SchemeConfig sc;
  sc.gradient = GradientScheme::CentralRegularized;
  const auto r = solve_dirichlet(disk(1.0 / 8, 2.0, 0.0, HamiltonianSpec::norm(ScalarField::constant(0.3), 0.3), sc));
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.method == SolveMethod::Explicit);
  SolveOptions pol;
  pol.method = SolveMethod::Policy;
  CHECK_THROWS_AS(solve_dirichlet(disk(1.0 / 8, 2.0, 0.0, {}, sc), pol), ConfigurationError);
}

TEST_CASE("property: an Euler step from a subsolution does not decrease it") {
  // u = 0 satisfies F[0] = -f >= 0 when f <= 0
  Discretization d(disk(1.0 / 16, -1.0, 1.0));
  std::vector<double> u(d.size(), 0.0);
  for (int s = 0; s < 20; ++s) {
    const auto prev = u;
    euler_step(d, u);
    for (std::size_t a = 0; a < u.size(); ++a) CHECK(u[a] >= prev[a] - 1e-15);
  }
}

namespace {

// smooth, vanishes on the unit circle, not a polynomial
double manufactured(std::span<const double> x) {
  return (x[0] * x[0] + x[1] * x[1] - 1.0) * std::exp(0.5 * x[0] + 0.3 * x[1]);
}

double manufactured_error(double h, int k, int width) {
  SchemeConfig sc;
  sc.k = k;
  sc.width = width;
  Discretization d(disk(h, 0.0, 0.0, {}, sc));
  std::vector<double> f(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    const auto H = oracle::fd_hessian(manufactured, d.grid().active_position(a), 1e-4);
    const auto [lo, hi] = oracle::eig2x2(H[0], H[1], H[3]);
    f[a] = k == 1 ? lo : lo + hi;
  }
  d.set_forcing_values(f);
  const auto r = solve_dirichlet(d);
  REQUIRE(r.status == SolveStatus::Converged);
  return max_error(r.u, manufactured);
}

}  // namespace

TEST_CASE("manufactured smooth solution: second order for k = N") {
  const double e1 = manufactured_error(1.0 / 16, 2, 1);
  const double e2 = manufactured_error(1.0 / 32, 2, 1);
  const double e3 = manufactured_error(1.0 / 64, 2, 1);
  CHECK(e1 / e2 >= 1.5);
  CHECK(e2 / e3 >= 1.5);
  CHECK(e3 <= 1e-4);
}

TEST_CASE("manufactured smooth solution: k = 1 error is governed by the stencil width") {
  // the directional resolution of a fixed stencil leaves an O(1) consistency error
  double prev = 1e300;
  for (int w : {1, 2, 3, 4}) {
    const double e = manufactured_error(1.0 / 64, 1, w);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev <= 0.005);
}

TEST_CASE("lipschitz estimate") {
  const auto r = solve_dirichlet(disk(1.0 / 32, 2.0));
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.lipschitz == doctest::Approx(2.0).epsilon(0.1));
  const auto est = lipschitz_estimate(r.u, 4);
  CHECK(est.shells.size() == 4);
  CHECK(est.value == doctest::Approx(r.lipschitz));

  GridField c(r.u.grid, 0.0);
  CHECK(lipschitz_estimate(c).value == 0.0);

  const auto ef = forms::eigen_cos(2, 1.0);
  GridField e(r.u.grid);
  for (std::size_t a = 0; a < e.values.size(); ++a) e.values[a] = ef.value(r.u.grid->active_position(a));
  CHECK(lipschitz_estimate(e).value == doctest::Approx(std::numbers::pi / 2).epsilon(0.1));
}

TEST_CASE("boundary growth") {
  std::vector<double> ratios;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto r = solve_dirichlet(disk(h, 2.0));
    REQUIRE(r.status == SolveStatus::Converged);
    CHECK(r.boundary_ratio <= 2.0 + 1e-6);
    CHECK(r.boundary_ratio == doctest::Approx(boundary_growth(r.u)));
    ratios.push_back(r.boundary_ratio);
  }
  CHECK(ratios[2] / ratios[0] <= 1.5);
  CHECK(ratios[0] / ratios[2] <= 1.5);
  const auto g = std::make_shared<const Grid>(build_grid(DomainSpec::ball({0, 0}, 1), 1.0 / 8, 2));
  CHECK(boundary_growth(GridField(g, 0.0)) == 0.0);
}

TEST_CASE("solver errors") {
  SolveOptions bad;
  bad.tol = -1.0;
  CHECK_THROWS_AS(solve_dirichlet(disk(1.0 / 8, 1.0), bad), ConfigurationError);
}
