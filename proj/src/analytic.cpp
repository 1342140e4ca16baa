#include "trunclap/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "trunclap/constants.hpp"
#include "trunclap/errors.hpp"

namespace trunclap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double radius_from(std::span<const double> x, const Point& c) { return distance_between(x, c); }

std::function<double(std::span<const double>)> center_singular(Point c) {
  return [c](std::span<const double> x) { return radius_from(x, c); };
}

HamiltonianSpec norm_h(double b) { return HamiltonianSpec::norm(ScalarField::constant(b), std::abs(b)); }
HamiltonianSpec neg_norm_h(double b) { return HamiltonianSpec::neg_norm(ScalarField::constant(b), std::abs(b)); }

Point origin(int dim) { return Point(dim, 0.0); }

}  // namespace

ClosedForm make_radial(std::string name, Point center, RadialProfile p, std::string singular_set,
                       std::function<double(std::span<const double>)> singular_distance) {
  ClosedForm f;
  f.name = std::move(name);
  f.dim = static_cast<int>(center.size());
  f.singular_set = std::move(singular_set);
  f.singular_distance = std::move(singular_distance);
  f.value = [c = center, eta = p.eta](std::span<const double> x) { return eta(radius_from(x, c)); };
  f.grad = [c = center, d1 = p.d1](std::span<const double> x) {
    const double r = radius_from(x, c);
    Point g(c.size(), 0.0);
    if (r == 0.0) return g;
    const double s = d1(r) / r;
    for (std::size_t i = 0; i < c.size(); ++i) g[i] = s * (x[i] - c[i]);
    return g;
  };
  f.hess = [c = center, d1 = p.d1, d2 = p.d2](std::span<const double> x) {
    const int n = static_cast<int>(c.size());
    const double r = radius_from(x, c);
    if (r == 0.0) return d2(0.0) * SymMatrix::identity(n);
    Point e(n);
    for (int i = 0; i < n; ++i) e[i] = (x[i] - c[i]) / r;
    const double tang = d1(r) / r;
    SymMatrix h = tang * SymMatrix::identity(n);
    h += (d2(r) - tang) * SymMatrix::outer(e);
    return h;
  };
  return f;
}

namespace forms {

ClosedForm hopf_barrier(int dim, double R, double gamma) {
  RadialProfile p{[=](double r) { return std::pow(R * R - r * r, gamma); },
                  [=](double r) { return -2.0 * gamma * r * std::pow(R * R - r * r, gamma - 1.0); },
                  [=](double r) {
                    const double q = R * R - r * r;
                    return -2.0 * gamma * std::pow(q, gamma - 1.0) +
                           4.0 * gamma * (gamma - 1.0) * r * r * std::pow(q, gamma - 2.0);
                  }};
  return make_radial("hopf_barrier", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm hopf_barrier_ext(int dim, double R, double gamma) {
  auto inside = [=](double r) { return r < R; };
  RadialProfile p{[=](double r) { return inside(r) ? std::pow(R * R - r * r, gamma) : 0.0; },
                  [=](double r) { return inside(r) ? -2.0 * gamma * r * std::pow(R * R - r * r, gamma - 1.0) : 0.0; },
                  [=](double r) {
                    if (!inside(r)) return 0.0;
                    const double q = R * R - r * r;
                    return -2.0 * gamma * std::pow(q, gamma - 1.0) +
                           4.0 * gamma * (gamma - 1.0) * r * r * std::pow(q, gamma - 2.0);
                  }};
  return make_radial("hopf_barrier_ext", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm exp_annulus(int dim, Point center, double delta, double alpha, double beta) {
  (void)dim;
  RadialProfile p{[=](double r) { return beta * (std::exp(-2.0 * alpha * delta) - std::exp(-alpha * r)); },
                  [=](double r) { return alpha * beta * std::exp(-alpha * r); },
                  [=](double r) { return -alpha * alpha * beta * std::exp(-alpha * r); }};
  auto sd = center_singular(center);
  return make_radial("exp_annulus", std::move(center), p, "center", std::move(sd));
}

ClosedForm dist_power(int dim, Point y0, double C, double gamma) {
  (void)dim;
  RadialProfile p{[=](double r) { return C * std::pow(r, gamma); },
                  [=](double r) { return C * gamma * std::pow(r, gamma - 1.0); },
                  [=](double r) { return C * gamma * (gamma - 1.0) * std::pow(r, gamma - 2.0); }};
  auto sd = center_singular(y0);
  return make_radial("dist_power", std::move(y0), p, "the point y0", std::move(sd));
}

ClosedForm paraboloid_y(int dim, Point y, double R, double M) {
  (void)dim;
  RadialProfile p{[=](double r) { return M * (R * R - r * r); }, [=](double r) { return -2.0 * M * r; },
                  [=](double) { return -2.0 * M; }};
  auto sd = center_singular(y);
  return make_radial("paraboloid_y", std::move(y), p, "center", std::move(sd));
}

ClosedForm cone_theta(int dim, double theta) {
  RadialProfile p{[=](double r) { return r - std::pow(r, theta); },
                  [=](double r) { return 1.0 - theta * std::pow(r, theta - 1.0); },
                  [=](double r) { return -theta * (theta - 1.0) * std::pow(r, theta - 2.0); }};
  return make_radial("cone_theta", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm log_barrier(int dim, double delta) {
  const double core = 1.0 / std::log(1.0 - delta);
  RadialProfile p{[=](double r) {
                    if (r <= delta) return core;
                    if (r >= 1.0) return 0.0;
                    return 1.0 / std::log(1.0 - r);
                  },
                  [=](double r) {
                    if (r <= delta || r >= 1.0) return 0.0;
                    const double L = std::log(1.0 - r);
                    return 1.0 / ((1.0 - r) * L * L);
                  },
                  [=](double r) {
                    if (r <= delta || r >= 1.0) return 0.0;
                    const double L = std::log(1.0 - r);
                    return (1.0 + 2.0 / L) / ((1.0 - r) * (1.0 - r) * L * L);
                  }};
  auto sd = [=](std::span<const double> x) {
    const double r = norm(x);
    return std::min({r, std::abs(r - delta), std::abs(1.0 - r)});
  };
  return make_radial("log_barrier", origin(dim), p, "center, |x| = delta and |x| = 1", sd);
}

ClosedForm annulus_sin(int dim, double eps) {
  const double c = std::cos(eps);
  RadialProfile p{[=](double r) { return std::sin(r) + c; }, [](double r) { return std::cos(r); },
                  [](double r) { return -std::sin(r); }};
  return make_radial("annulus_sin", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm harnack_sq(int dim) {
  ClosedForm f;
  f.name = "harnack_sq";
  f.dim = dim;
  f.singular_set = "none";
  f.value = [dim](std::span<const double> x) { return x[dim - 1] * x[dim - 1]; };
  f.grad = [dim](std::span<const double> x) {
    Point g(dim, 0.0);
    g[dim - 1] = 2.0 * x[dim - 1];
    return g;
  };
  f.hess = [dim](std::span<const double>) {
    SymMatrix h(dim);
    h.set(dim - 1, dim - 1, 2.0);
    return h;
  };
  f.singular_distance = [](std::span<const double>) { return kInf; };
  return f;
}

ClosedForm halfspace_pow(int dim, double gamma) {
  ClosedForm f;
  f.name = "halfspace_pow";
  f.dim = dim;
  f.singular_set = "x1 = 0";
  f.value = [=](std::span<const double> x) { return std::pow(x[0], gamma); };
  f.grad = [=](std::span<const double> x) {
    Point g(dim, 0.0);
    g[0] = gamma * std::pow(x[0], gamma - 1.0);
    return g;
  };
  f.hess = [=](std::span<const double> x) {
    SymMatrix h(dim);
    h.set(0, 0, gamma * (gamma - 1.0) * std::pow(x[0], gamma - 2.0));
    return h;
  };
  f.singular_distance = [](std::span<const double> x) { return std::abs(x[0]); };
  return f;
}

ClosedForm bnv_quartic(int dim, double R1) {
  RadialProfile p{[=](double r) { return -(R1 * R1 - r * r) * (R1 * R1 - r * r); },
                  [=](double r) { return 4.0 * r * (R1 * R1 - r * r); },
                  [=](double r) { return 4.0 * R1 * R1 - 12.0 * r * r; }};
  return make_radial("bnv_quartic", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm linear_ball(int dim, double R2) {
  RadialProfile p{[=](double r) { return -(R2 * R2 - r * r); }, [](double r) { return 2.0 * r; },
                  [](double) { return 2.0; }};
  return make_radial("linear_ball", origin(dim), p, "center", center_singular(origin(dim)));
}

ClosedForm eigen_cos(int dim, double R) {
  const double c = kPi / (2.0 * R);
  RadialProfile p{[=](double r) { return -std::cos(c * r); }, [=](double r) { return c * std::sin(c * r); },
                  [=](double r) { return c * c * std::cos(c * r); }};
  return make_radial("eigen_cos", origin(dim), p, "center", center_singular(origin(dim)));
}

}  // namespace forms

ResidualReport residual(const ClosedForm& form, OperatorChoice op, const HamiltonianSpec& H, double mu,
                        double f_const, std::span<const Point> points) {
  if (op.k < 1 || op.k > form.dim) throw InvalidInput("residual: k out of range");
  ResidualReport rep;
  for (const auto& x : points) {
    if (static_cast<int>(x.size()) != form.dim) throw InvalidInput("residual: point has the wrong dimension");
    if (form.singular_distance(x) < tol::kSingularMargin) {
      rep.skipped.push_back(x);
      continue;
    }
    const double r = pk(form.hess(x), op.k, op.sign) + eval_h(H, x, form.grad(x)) + mu * form.value(x) - f_const;
    rep.values.push_back(r);
    rep.points.push_back(x);
  }
  return rep;
}

const char* to_string(Sense s) {
  switch (s) {
    case Sense::NonPositive:
      return "<=0";
    case Sense::NonNegative:
      return ">=0";
    case Sense::Zero:
      return "=0";
  }
  return "?";
}

Certification certify_sign(const ClosedForm& form, OperatorChoice op, const HamiltonianSpec& H, double mu,
                           double f_const, std::span<const Point> points, Sense sense, double tol) {
  const auto rep = residual(form, op, H, mu, f_const, points);
  Certification c;
  c.name = form.name;
  c.sense = sense;
  c.samples = static_cast<int>(rep.values.size());
  c.skipped = static_cast<int>(rep.skipped.size());
  // badness: how far each residual sits on the wrong side
  double worst_bad = -kInf;
  for (std::size_t i = 0; i < rep.values.size(); ++i) {
    const double r = rep.values[i];
    const double bad = sense == Sense::NonPositive ? r : sense == Sense::NonNegative ? -r : std::abs(r);
    if (bad > worst_bad) {
      worst_bad = bad;
      c.worst = r;
      c.worst_point = rep.points[i];
    }
  }
  c.pass = c.samples > 0 && worst_bad <= tol;
  return c;
}

CorollaryBounds corollary_bounds(int k, double b, double R1, double R2) {
  if (!(R1 > 0.0) || !(R2 > 0.0)) throw InvalidInput("corollary_bounds: radii must be positive");
  if (R1 > R2 * (1.0 + 1e-12)) throw InvalidInput("corollary_bounds: need R1 <= R2");
  if (k < 1) throw InvalidInput("corollary_bounds: k must be >= 1");
  if (!(b >= 0.0)) throw InvalidInput("corollary_bounds: b must be >= 0");
  CorollaryBounds cb;
  cb.lower_finite = b * R2 <= k;
  cb.lower = cb.lower_finite ? 2.0 * (k - b * R2) / (R2 * R2) : -kInf;
  cb.upper = 2.0 * (k + b * R1) * (2.0 + k + b * R1) / (R1 * R1);
  return cb;
}

std::vector<Point> sample_shell(int dim, const Point& c, double r_lo, double r_hi, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(n);
  const double lo = std::pow(r_lo, dim), hi = std::pow(r_hi, dim);
  for (int i = 0; i < n; ++i) {
    Point v(dim);
    double s = 0.0;
    do {
      for (auto& x : v) x = g(rng);
      s = norm(v);
    } while (s < 1e-12);
    const double r = std::pow(lo + (hi - lo) * u(rng), 1.0 / dim);
    for (int j = 0; j < dim; ++j) v[j] = c[j] + r * v[j] / s;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> catalog_names() {
  return {"hopf_barrier", "hopf_barrier_ext", "exp_annulus", "dist_power",  "paraboloid_y",
          "cone_theta",   "log_barrier",      "annulus_sin", "harnack_sq",  "halfspace_pow",
          "bnv_quartic",  "linear_ball",      "eigen_cos"};
}

CertificationCase make_case(const std::string& name, const CaseOverrides& ov) {
  CertificationCase c;
  c.name = name;
  auto ball_sampler = [](int dim, double lo, double hi) {
    return [=](int n, std::mt19937_64& rng) { return sample_shell(dim, origin(dim), lo, hi, n, rng); };
  };

  if (name == "hopf_barrier") {
    // w = (R^2 - |x|^2)^gamma, gamma = 2, R = 1; nonpositive residual needs b R <= k
    const double R = 1.0, b = ov.b.value_or(1.0);
    c.form = forms::hopf_barrier(2, R, 2.0);
    c.op = {OperatorSign::Minus, 1};
    c.H = norm_h(b);
    c.sense = Sense::NonPositive;
    c.region = "B_1";
    c.sampler = ball_sampler(2, 0.0, R);
  } else if (name == "hopf_barrier_ext") {
    const double R = 1.0, b = ov.b.value_or(1.0);
    c.form = forms::hopf_barrier_ext(2, R, 3.0);
    c.op = {OperatorSign::Minus, 1};
    c.H = norm_h(b);
    c.sense = Sense::NonPositive;
    c.region = "B_1.5";
    c.sampler = ball_sampler(2, 0.0, 1.5);
  } else if (name == "exp_annulus") {
    const double delta = 0.25, b = ov.b.value_or(1.0);
    c.form = forms::exp_annulus(3, origin(3), delta, 6.0, 1.0);
    c.op = {OperatorSign::Minus, 2};
    c.H = norm_h(b);
    c.sense = Sense::NonPositive;
    c.region = "delta < |x| < 2 delta, delta = 0.25";
    c.sampler = ball_sampler(3, delta, 2.0 * delta);
  } else if (name == "dist_power") {
    const double m = 0.5, b = ov.b.value_or(1.0);
    c.form = forms::dist_power(2, origin(2), 1.0, 0.5);
    c.op = {OperatorSign::Minus, 1};
    c.H = norm_h(b);
    c.f = -m;
    c.sense = Sense::NonPositive;
    c.region = "0 < |x - y0| < 0.25";
    c.sampler = ball_sampler(2, 0.0, 0.25);
  } else if (name == "paraboloid_y") {
    const double R = 1.0, m = 1.0, k = 1.0, b = ov.b.value_or(0.5);
    c.form = forms::paraboloid_y(2, origin(2), R, m / (k - b * R));
    c.op = {OperatorSign::Plus, 1};
    c.H = norm_h(b);
    c.f = -m;
    c.sense = Sense::NonPositive;
    c.region = "B_1(y)";
    c.sampler = ball_sampler(2, 0.0, R);
  } else if (name == "cone_theta") {
    const double b = ov.b.value_or(1.0);
    c.form = forms::cone_theta(2, 1.5);
    c.op = {OperatorSign::Minus, 1};
    c.H = norm_h(b);
    c.f = -1.0;
    c.sense = Sense::NonPositive;
    c.region = "0 < |x| < 0.05";
    c.sampler = ball_sampler(2, 0.0, 0.05);
  } else if (name == "log_barrier") {
    const double delta = 0.9;
    c.form = forms::log_barrier(2, delta);
    c.op = {OperatorSign::Minus, 1};
    c.H = ov.b ? norm_h(*ov.b) : HamiltonianSpec::zero();
    c.sense = Sense::NonNegative;
    c.region = "0.9 < |x| < 1";
    c.sampler = ball_sampler(2, delta, 1.0);
  } else if (name == "annulus_sin") {
    const double eps = 0.1, k = 1.0;
    const double b = ov.b.value_or(k / (1.5 * kPi));
    c.form = forms::annulus_sin(2, eps);
    c.op = {OperatorSign::Minus, 1};
    c.H = neg_norm_h(b);
    c.sense = Sense::NonPositive;
    c.region = "3pi/2 - 0.1 < |x| < 3pi/2 + 0.1";
    c.sampler = ball_sampler(2, 1.5 * kPi - eps, 1.5 * kPi + eps);
  } else if (name == "harnack_sq") {
    c.form = forms::harnack_sq(3);
    c.op = {OperatorSign::Minus, 2};
    c.H = ov.b ? norm_h(*ov.b) : HamiltonianSpec::zero();
    c.sense = Sense::Zero;
    c.region = "B_1 in R^3";
    c.sampler = ball_sampler(3, 0.0, 1.0);
  } else if (name == "halfspace_pow") {
    c.form = forms::halfspace_pow(2, 0.5);
    c.op = {OperatorSign::Plus, 1};
    c.H = ov.b ? norm_h(*ov.b) : HamiltonianSpec::zero();
    c.sense = Sense::Zero;
    c.region = "0 < x1 < 1, |x2| < 1";
    c.sampler = [](int n, std::mt19937_64& rng) {
      std::uniform_real_distribution<double> u1(0.0, 1.0), u2(-1.0, 1.0);
      std::vector<Point> out;
      for (int i = 0; i < n; ++i) out.push_back({u1(rng), u2(rng)});
      return out;
    };
  } else if (name == "bnv_quartic") {
    const double R1 = 1.0, b = ov.b.value_or(0.5);
    c.form = forms::bnv_quartic(2, R1);
    c.op = {OperatorSign::Minus, 1};
    c.H = norm_h(b);
    c.mu = corollary_bounds(1, b, R1, R1).upper;
    c.sense = Sense::NonPositive;
    c.region = "B_R1, R1 = 1";
    c.sampler = ball_sampler(2, 0.0, R1);
  } else if (name == "linear_ball") {
    const double R2 = 1.0, b = ov.b.value_or(0.5);
    c.form = forms::linear_ball(2, R2);
    c.op = {OperatorSign::Minus, 1};
    c.H = neg_norm_h(b);
    c.mu = 2.0 * (1.0 - b * R2) / (R2 * R2);
    c.sense = Sense::NonNegative;
    c.region = "B_R2, R2 = 1";
    c.sampler = ball_sampler(2, 0.0, R2);
  } else if (name == "eigen_cos") {
    const double R = 1.0;
    c.form = forms::eigen_cos(2, R);
    c.op = {OperatorSign::Minus, 1};
    c.H = ov.b ? norm_h(*ov.b) : HamiltonianSpec::zero();
    c.mu = (kPi / (2.0 * R)) * (kPi / (2.0 * R));
    c.sense = Sense::Zero;
    c.region = "B_1";
    c.sampler = ball_sampler(2, 0.0, R);
  } else {
    throw InvalidInput("unknown catalog entry: " + name);
  }
  if (ov.mu) c.mu = *ov.mu;
  return c;
}

std::vector<CertificationCase> default_certifications() {
  std::vector<CertificationCase> out;
  for (const auto& n : catalog_names()) out.push_back(make_case(n));
  return out;
}

Certification run_case(const CertificationCase& c, int samples, std::uint64_t seed, double tol) {
  if (samples < 1) throw InvalidInput("run_case: samples must be >= 1");
  std::mt19937_64 rng(seed);
  const auto pts = c.sampler(samples, rng);
  auto cert = certify_sign(c.form, c.op, c.H, c.mu, c.f, pts, c.sense, tol);
  cert.name = c.name;
  return cert;
}

std::vector<double> holder_quotients(const ClosedForm& form, double gamma, int shells, int pairs,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  const int n = form.dim;
  for (int s = 1; s <= shells; ++s) {
    const double d_hi = std::pow(10.0, -2.0 * s), d_lo = d_hi / 10.0;
    std::uniform_real_distribution<double> ud(d_lo, d_hi);
    std::normal_distribution<double> g;
    std::vector<Point> pts;
    for (int i = 0; i < pairs; ++i) {
      Point v(n);
      for (auto& c : v) c = g(rng);
      const double len = norm(v);
      const double r = 1.0 - ud(rng);
      for (auto& c : v) c *= r / len;
      pts.push_back(std::move(v));
    }
    double q = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point& x = pts[i];
      Point y = x;
      const double r = norm(x);
      for (auto& c : y) c /= r;
      q = std::max(q, std::abs(form.value(x) - form.value(y)) / std::pow(distance_between(x, y), gamma));
      const Point& z = pts[(i + 1) % pts.size()];
      const double dxz = distance_between(x, z);
      if (dxz > 0.0) q = std::max(q, std::abs(form.value(x) - form.value(z)) / std::pow(dxz, gamma));
    }
    out.push_back(q);
  }
  return out;
}

}  // namespace trunclap
