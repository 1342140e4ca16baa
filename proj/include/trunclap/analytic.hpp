#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trunclap/field.hpp"
#include "trunclap/hamiltonians.hpp"
#include "trunclap/symcore.hpp"

namespace trunclap {

/// Explicit function with analytic gradient and Hessian.
struct ClosedForm {
  std::string name;
  int dim = 2;
  std::string singular_set;  // human-readable
  std::function<double(std::span<const double>)> value;
  std::function<Point(std::span<const double>)> grad;
  std::function<SymMatrix(std::span<const double>)> hess;
  /// Distance from x to the set where the function fails to be C^2.
  std::function<double(std::span<const double>)> singular_distance;
};

/// Radial profile eta(r) with its first two derivatives.
struct RadialProfile {
  std::function<double(double)> eta, d1, d2;
};

/// v(x) = eta(|x - c|). The Hessian has eigenvalue eta'' along x - c and eta'/r on the
/// orthogonal complement.
ClosedForm make_radial(std::string name, Point center, RadialProfile p, std::string singular_set,
                       std::function<double(std::span<const double>)> singular_distance);

namespace forms {
ClosedForm hopf_barrier(int dim, double R, double gamma);
ClosedForm hopf_barrier_ext(int dim, double R, double gamma);
ClosedForm exp_annulus(int dim, Point center, double delta, double alpha, double beta);
ClosedForm dist_power(int dim, Point y0, double C, double gamma);
ClosedForm paraboloid_y(int dim, Point y, double R, double M);
ClosedForm cone_theta(int dim, double theta);
ClosedForm log_barrier(int dim, double delta);
ClosedForm annulus_sin(int dim, double eps);
ClosedForm harnack_sq(int dim);
ClosedForm halfspace_pow(int dim, double gamma);
ClosedForm bnv_quartic(int dim, double R1);
ClosedForm linear_ball(int dim, double R2);
ClosedForm eigen_cos(int dim, double R);
}  // namespace forms

struct OperatorChoice {
  OperatorSign sign = OperatorSign::Minus;
  int k = 1;
};

struct ResidualReport {
  std::vector<double> values;  // one per evaluated point
  std::vector<Point> points;   // the evaluated points
  std::vector<Point> skipped;  // points within the singular margin
};

/// r(x) = P^s_k(D^2 v(x)) + H(x, Dv(x)) + mu v(x) - f.
ResidualReport residual(const ClosedForm& form, OperatorChoice op, const HamiltonianSpec& H, double mu,
                        double f_const, std::span<const Point> points);

enum class Sense { NonPositive, NonNegative, Zero };

const char* to_string(Sense s);

struct Certification {
  std::string name;
  Sense sense = Sense::Zero;
  bool pass = false;
  double worst = 0.0;  // the residual farthest on the wrong side (or largest |r| for Zero)
  Point worst_point;
  int samples = 0;
  int skipped = 0;
};

Certification certify_sign(const ClosedForm& form, OperatorChoice op, const HamiltonianSpec& H, double mu,
                           double f_const, std::span<const Point> points, Sense sense, double tol = 1e-8);

struct CorollaryBounds {
  double lower = 0.0;
  bool lower_finite = true;  // false when b R2 > k
  double upper = 0.0;
};

/// lower = 2(k - b R2)/R2^2 (when b R2 <= k), upper = 2(k + b R1)(2 + k + b R1)/R1^2.
CorollaryBounds corollary_bounds(int k, double b, double R1, double R2);

/// A named certification: closed form, operator, Hamiltonian, mu, constant f, sampling region, sense.
struct CertificationCase {
  std::string name;
  ClosedForm form;
  OperatorChoice op;
  HamiltonianSpec H;
  double mu = 0.0;
  double f = 0.0;
  Sense sense = Sense::Zero;
  std::string region;  // human-readable
  std::function<std::vector<Point>(int, std::mt19937_64&)> sampler;
};

/// Overrides accepted by make_case: the Hamiltonian coefficient b and the eigenvalue mu.
struct CaseOverrides {
  std::optional<double> b;
  std::optional<double> mu;
};

std::vector<std::string> catalog_names();
/// Throws InvalidInput for unknown names.
CertificationCase make_case(const std::string& name, const CaseOverrides& ov = {});
std::vector<CertificationCase> default_certifications();
Certification run_case(const CertificationCase& c, int samples, std::uint64_t seed = 1u, double tol = 1e-8);

/// Uniform samples from {r_lo < |x - c| < r_hi}.
std::vector<Point> sample_shell(int dim, const Point& c, double r_lo, double r_hi, int n, std::mt19937_64& rng);

/// Sampled Hoelder quotient sup |u(x) - u(y)| / |x - y|^gamma near the unit sphere, one value per
/// shell s = 1..shells. Shell s holds the points with 1 - |x| in [10^{-2s-1}, 10^{-2s}]; each is
/// paired with its radial projection onto the sphere (where u = 0) and with other shell points.
std::vector<double> holder_quotients(const ClosedForm& form, double gamma, int shells, int pairs,
                                     std::uint64_t seed = 3u);

}  // namespace trunclap
