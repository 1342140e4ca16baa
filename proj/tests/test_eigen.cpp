#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"

using namespace trunclap;

namespace {

const double kPi2over4 = std::numbers::pi * std::numbers::pi / 4;

ProblemSpec disk(double R, double h, SchemeConfig sc = {}) {
  return ProblemSpec{DomainSpec::ball({0, 0}, R), sc, {}, 0.0, ScalarField::constant(1.0), h};
}

}  // namespace

TEST_CASE("unit disk bracket contains pi^2 / 4") {
  const auto est = estimate_mu_minus(disk(1.0, 1.0 / 32));
  CHECK(est.mu_lo <= kPi2over4 * 1.05);
  CHECK(est.mu_hi >= kPi2over4 * 0.95);
  CHECK(est.mu_hi - est.mu_lo <= 0.02 + 1e-12);
  CHECK(est.mu_mid == doctest::Approx(0.5 * (est.mu_lo + est.mu_hi)));
  CHECK(std::abs(est.mu_mid - kPi2over4) / kPi2over4 <= 0.05);
  CHECK_FALSE(est.domain_outside_C_R);
  CHECK_FALSE(est.experimental);
  CHECK(est.bound_lo_finite);
}

TEST_CASE("property: estimates lie in the a-priori sandwich and respect the bracket") {
  for (double R : {0.5, 1.0, 2.0}) {
    const auto est = estimate_mu_minus(disk(R, R / 16));
    CHECK(est.bound_lo <= est.mu_mid);
    CHECK(est.mu_mid <= est.bound_hi);
    CHECK(est.mu_lo < est.mu_hi);
  }
}

TEST_CASE("property: scale covariance mu(R) R^2 = mu(1)") {
  const double ref = estimate_mu_minus(disk(1.0, 1.0 / 16)).mu_mid;
  for (double R : {0.5, 2.0}) {
    EigenOptions opt;
    opt.tol_mu = 0.02 / (R * R);
    const auto est = estimate_mu_minus(disk(R, R / 16), opt);
    CHECK(est.mu_mid * R * R == doctest::Approx(ref).epsilon(0.02));
  }
}

TEST_CASE("property: the bisection history is monotone") {
  const auto est = estimate_mu_minus(disk(1.0, 1.0 / 16));
  REQUIRE(est.history.size() >= 2);
  double max_below = -1e300, min_above = 1e300;
  for (const auto& s : est.history) {
    if (s.cls == Classification::Below)
      max_below = std::max(max_below, s.mu);
    else
      min_above = std::min(min_above, s.mu);
  }
  CHECK(max_below < min_above);
  CHECK(max_below == doctest::Approx(est.mu_lo));
  CHECK(min_above == doctest::Approx(est.mu_hi));
}

TEST_CASE("eigenfunction shape") {
  const auto est = estimate_mu_minus(disk(1.0, 1.0 / 32));
  const auto ref = forms::eigen_cos(2, 1.0);
  const auto rep = eigenfunction_check(est, &ref, 0.05);
  CHECK(rep.nonpositive);
  CHECK(rep.normalized);
  CHECK(rep.strictly_negative);
  CHECK(rep.deep_nodes > 0);
  CHECK(rep.min_value == doctest::Approx(-1.0));
  REQUIRE(rep.reference_error);
  CHECK(*rep.reference_error <= 0.05);
  CHECK(rep.pass);
}

TEST_CASE("classify_mu") {
  Discretization d(disk(1.0, 1.0 / 16));
  CHECK(classify_mu(d, 0.0, {}).cls == Classification::Below);
  CHECK(classify_mu(d, 2.0, {}).cls == Classification::Below);
  CHECK(classify_mu(d, 3.0, {}).cls == Classification::Above);
}

TEST_CASE("maximum principle probe") {
  const auto rows = max_principle_probe(disk(1.0, 1.0 / 32), {0, 1, 2, 3}, {1});
  REQUIRE(rows.size() == 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(rows[i].cls == Classification::Below);
    CHECK(rows[i].sign_ok);
    CHECK(rows[i].forcing == 1.0);
  }
  CHECK(rows[3].cls == Classification::Above);
  CHECK(rows[4].forcing == -1.0);
  CHECK(rows[4].cls == Classification::Below);
  CHECK(rows[4].min_value >= -1e-8);
}

TEST_CASE("dual probe at mu = 50 has no nonnegative discrete solution at desk resolution") {
  // the f <= 0 solution grows like (R'^2 - |x|^2)^(mu R^2 / 2); at h = 1/32 the monotone
  // iteration from u = 0 blows up, so the probe reports ABOVE
  const auto rows = max_principle_probe(disk(1.0, 1.0 / 32), {}, {50});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].cls == Classification::Above);
}

TEST_CASE("bracket failure") {
  EigenOptions opt;
  opt.solve.blowup_norm = 1e-12;  // every mu classifies ABOVE
  CHECK_THROWS_AS(estimate_mu_minus(disk(1.0, 1.0 / 8), opt), BracketFailure);
}

TEST_CASE("advisory flags") {
  ProblemSpec ann{DomainSpec::annulus({0, 0}, 0.5, 1.0), {}, {}, 0.0, ScalarField::constant(1.0), 1.0 / 16};
  const auto est = estimate_mu_minus(ann);
  CHECK(est.domain_outside_C_R);
  CHECK(est.mu_lo < est.mu_hi);

  SchemeConfig k2;
  k2.k = 2;
  const auto lap = estimate_mu_minus(disk(1.0, 1.0 / 16, k2));
  CHECK(lap.experimental);
  // Dirichlet Laplacian eigenvalue j_{0,1}^2 on the unit disk
  CHECK(lap.mu_mid == doctest::Approx(5.7832).epsilon(0.03));
}

TEST_CASE("options are validated") {
  EigenOptions opt;
  opt.tol_mu = 0.0;
  CHECK_THROWS(estimate_mu_minus(disk(1.0, 1.0 / 8), opt));
}
