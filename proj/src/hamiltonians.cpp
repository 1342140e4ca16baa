#include "trunclap/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "trunclap/constants.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/geometry.hpp"

namespace trunclap {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance_between(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double ScalarField::operator()(std::span<const double> x) const {
  switch (kind) {
    case Kind::Constant:
      return c0;
    case Kind::Affine:
      return c0 + dot(gradient, x);
    case Kind::Trig:
      return c0 + amplitude * std::sin(frequency * x[axis] + phase);
  }
  return c0;
}

std::string ScalarField::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant:
      os << c0;
      break;
    case Kind::Affine:
      os << c0;
      for (std::size_t i = 0; i < gradient.size(); ++i) os << " + " << gradient[i] << "*x" << i + 1;
      break;
    case Kind::Trig:
      os << c0 << " + " << amplitude << "*sin(" << frequency << "*x" << axis + 1 << " + " << phase << ")";
      break;
  }
  return os.str();
}

namespace {

// Lipschitz constant of a catalog field in x.
double field_lipschitz(const ScalarField& f) {
  switch (f.kind) {
    case ScalarField::Kind::Constant:
      return 0.0;
    case ScalarField::Kind::Affine:
      return norm(f.gradient);
    case ScalarField::Kind::Trig:
      return std::abs(f.amplitude * f.frequency);
  }
  return 0.0;
}

double lipschitz_bound(const HamiltonianSpec& spec) {
  switch (spec.kind) {
    case HamiltonianKind::Zero:
      return 0.0;
    case HamiltonianKind::Norm:
    case HamiltonianKind::NegNorm:
      return field_lipschitz(spec.b);
    case HamiltonianKind::Drift: {
      double s = 0.0;
      for (const auto& c : spec.drift) s += field_lipschitz(c) * field_lipschitz(c);
      return std::sqrt(s);
    }
  }
  return 0.0;
}

Point random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Point v(n);
  double s = 0.0;
  do {
    for (auto& c : v) c = g(rng);
    s = norm(v);
  } while (s < 1e-12);
  for (auto& c : v) c /= s;
  return v;
}

}  // namespace

const char* to_string(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::Zero:
      return "zero";
    case HamiltonianKind::Norm:
      return "norm";
    case HamiltonianKind::NegNorm:
      return "neg_norm";
    case HamiltonianKind::Drift:
      return "drift";
  }
  return "?";
}

double eval_h(const HamiltonianSpec& spec, std::span<const double> x, std::span<const double> xi) {
  switch (spec.kind) {
    case HamiltonianKind::Zero:
      return 0.0;
    case HamiltonianKind::Norm:
      return spec.b(x) * norm(xi);
    case HamiltonianKind::NegNorm:
      return -spec.b(x) * norm(xi);
    case HamiltonianKind::Drift: {
      double s = 0.0;
      for (std::size_t i = 0; i < spec.drift.size() && i < xi.size(); ++i) s += spec.drift[i](x) * xi[i];
      return s;
    }
  }
  return 0.0;
}

double norm_coefficient(const HamiltonianSpec& spec, std::span<const double> x) {
  switch (spec.kind) {
    case HamiltonianKind::Norm:
      return spec.b(x);
    case HamiltonianKind::NegNorm:
      return -spec.b(x);
    default:
      return 0.0;
  }
}

StructureReport validate_structure(const HamiltonianSpec& spec, const DomainSpec& domain, int samples,
                                   std::uint64_t seed) {
  if (samples < 1) throw InvalidInput("validate_structure: samples must be >= 1");
  if (spec.kind == HamiltonianKind::Drift && static_cast<int>(spec.drift.size()) != domain.dim())
    throw InvalidInput("validate_structure: drift field has the wrong number of components");

  std::mt19937_64 rng(seed);
  const int n = domain.dim();
  auto xs = domain.interior_samples(samples, rng);
  auto ys = domain.interior_samples(samples, rng);
  std::lognormal_distribution<double> scale(0.0, 1.5);

  StructureReport rep;
  rep.samples = samples;
  rep.sc1.slack = std::numeric_limits<double>::infinity();
  rep.sc2.slack = 0.0;
  const double c_bound = lipschitz_bound(spec);
  double c_seen = 0.0;

  for (int s = 0; s < samples; ++s) {
    const Point& x = xs[s];
    Point xi = random_unit(n, rng);
    const double r = scale(rng);
    for (auto& c : xi) c *= r;
    const double hx = eval_h(spec, x, xi);
    const double xi_norm = norm(xi);

    // (SC1), measured per unit |xi|
    const double m1 = spec.b_bound - std::abs(hx) / xi_norm;
    if (m1 < rep.sc1.slack) {
      rep.sc1.slack = m1;
      rep.sc1.worst_x = x;
      rep.sc1.worst_xi = xi;
    }

    // (SC2)
    for (double t : {0.5, 2.0, 10.0}) {
      Point txi = xi;
      for (auto& c : txi) c *= t;
      const double err = std::abs(eval_h(spec, x, txi) - t * hx);
      const double allowed = tol::kIdentity * (1.0 + std::abs(t * hx));
      if (allowed - err < rep.sc2.slack) {
        rep.sc2.slack = allowed - err;
        rep.sc2.worst_x = x;
        rep.sc2.worst_xi = xi;
      }
    }

    // (SC3) through the sampled Lipschitz-in-x quotient
    const Point& y = ys[s];
    const double dxy = distance_between(x, y);
    if (dxy > 1e-12) {
      const double q = std::abs(hx - eval_h(spec, y, xi)) / (dxy * xi_norm);
      if (q > c_seen) {
        c_seen = q;
        rep.sc3.worst_x = x;
        rep.sc3.worst_xi = xi;
      }
    }
  }

  rep.sc1.pass = rep.sc1.slack >= -tol::kIdentity * (1.0 + spec.b_bound);
  rep.sc2.pass = rep.sc2.slack >= 0.0;
  rep.lipschitz_x = c_seen;
  rep.sc3.slack = c_bound * (1.0 + 1e-9) + tol::kIdentity - c_seen;
  rep.sc3.pass = std::isfinite(c_seen) && rep.sc3.slack >= 0.0;
  return rep;
}

}  // namespace trunclap
