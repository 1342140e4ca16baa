#include "trunclap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "trunclap/constants.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/symcore.hpp"

namespace trunclap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(std::size_t n, const char* what) {
  if (n != 2 && n != 3) throw InvalidInput(std::string(what) + ": dimension must be 2 or 3");
}

void check_point(std::span<const double> p, const char* what) {
  for (double v : p)
    if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite coordinate");
}

Point sub(std::span<const double> a, std::span<const double> b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point unit_or_e1(Point v) {
  const double n = norm(v);
  if (n < 1e-300) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    return v;
  }
  for (auto& c : v) c /= n;
  return v;
}

// Evenly spread unit vectors: a regular polygon in 2D, a Fibonacci lattice in 3D.
std::vector<Point> sphere_points(int dim, int n) {
  std::vector<Point> out;
  out.reserve(n);
  if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n;
      out.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    // poles and equator axes, so extreme points are always present
    for (int a = 0; a < 3; ++a)
      for (double s : {1.0, -1.0}) {
        Point e(3, 0.0);
        e[a] = s;
        out.push_back(e);
      }
  }
  return out;
}

// Approximate center of the smallest ball enclosing the points (Badoiu-Clarkson).
Point enclosing_center(const std::vector<Point>& pts) {
  Point c(pts[0].size(), 0.0);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += p[i] / pts.size();
  for (int it = 1; it <= 4000; ++it) {
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double d = distance_between(c, pts[j]);
      if (d > best) best = d, far = j;
    }
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += (pts[far][i] - c[i]) / (it + 1.0);
  }
  return c;
}

}  // namespace

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Ball:
      return "ball";
    case DomainKind::BallIntersection:
      return "ball_intersection";
    case DomainKind::Annulus:
      return "annulus";
    case DomainKind::Ellipse:
      return "ellipse";
    case DomainKind::HalfSpaceBox:
      return "halfspace_box";
  }
  return "?";
}

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Exterior:
      return "exterior";
    case NodeClass::Interior:
      return "interior";
    case NodeClass::Cut:
      return "cut";
  }
  return "?";
}

DomainSpec DomainSpec::ball(Point center, double radius) {
  check_dim(center.size(), "ball");
  check_point(center, "ball");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("ball: radius must be positive");
  const int n = static_cast<int>(center.size());
  return DomainSpec(n, Ball{std::move(center), radius});
}

DomainSpec DomainSpec::ball_intersection(std::vector<Point> centers, double radius) {
  if (centers.empty()) throw InvalidInput("ball_intersection: no balls given");
  check_dim(centers[0].size(), "ball_intersection");
  for (const auto& c : centers) {
    if (c.size() != centers[0].size()) throw InvalidInput("ball_intersection: mixed dimensions");
    check_point(c, "ball_intersection");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("ball_intersection: radius must be positive");
  const int n = static_cast<int>(centers[0].size());
  DomainSpec d(n, BallIntersection{std::move(centers), radius});
  const Point c = enclosing_center(std::get<BallIntersection>(d.shape_).centers);
  if (!(d.distance(c) > 0.0)) throw InvalidInput("ball_intersection: the intersection is empty");
  return d;
}

DomainSpec DomainSpec::annulus(Point center, double r_in, double r_out) {
  check_dim(center.size(), "annulus");
  check_point(center, "annulus");
  if (!(r_in > 0.0) || !(r_in < r_out) || !std::isfinite(r_out))
    throw InvalidInput("annulus: need 0 < r_in < r_out");
  const int n = static_cast<int>(center.size());
  return DomainSpec(n, Annulus{std::move(center), r_in, r_out});
}

DomainSpec DomainSpec::ellipse(Point center, std::vector<double> semi_axes) {
  check_dim(center.size(), "ellipse");
  check_point(center, "ellipse");
  if (semi_axes.size() != center.size()) throw InvalidInput("ellipse: one semi-axis per dimension");
  for (double a : semi_axes)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("ellipse: semi-axes must be positive");
  const int n = static_cast<int>(center.size());
  return DomainSpec(n, Ellipse{std::move(center), std::move(semi_axes)});
}

DomainSpec DomainSpec::halfspace_box(int dim, double half_width) {
  check_dim(static_cast<std::size_t>(dim), "halfspace_box");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidInput("halfspace_box: width must be positive");
  return DomainSpec(dim, HalfSpaceBox{dim, half_width});
}

DomainKind DomainSpec::kind() const { return static_cast<DomainKind>(shape_.index()); }

Point ellipsoid_foot_point(std::span<const double> semi_axes, std::span<const double> p) {
  const std::size_t n = semi_axes.size();
  // Sort axes descending and fold p into the first orthant.
  std::vector<std::size_t> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](auto a, auto b) { return semi_axes[a] > semi_axes[b]; });
  std::vector<double> e(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = semi_axes[ord[i]];
    y[i] = std::abs(p[ord[i]]);
  }
  const double emin = e[n - 1];

  // x_i = e_i^2 y_i / (t + e_i^2) with t the root of F(t) = sum (e_i y_i / (t + e_i^2))^2 - 1.
  auto F = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = e[i] * y[i] / (t + e[i] * e[i]);
      s += q * q;
    }
    return s - 1.0;
  };

  // Components along the smallest axis (possibly repeated). The pole at t = -emin^2 only
  // exists when one of them is nonzero.
  bool pole = false;
  for (std::size_t i = 0; i < n; ++i)
    if (e[i] == emin && y[i] > 0.0) pole = true;

  std::vector<double> x(n, 0.0);
  bool degenerate = false;
  if (!pole) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] != emin) {
        x[i] = e[i] * e[i] * y[i] / (e[i] * e[i] - emin * emin);
        s += (x[i] / e[i]) * (x[i] / e[i]);
      }
    if (s <= 1.0) {
      degenerate = true;
      for (std::size_t i = 0; i < n; ++i)
        if (e[i] == emin) {
          x[i] = emin * std::sqrt(1.0 - s);
          break;
        }
    }
  }
  if (!degenerate) {
    double ey = 0.0;
    for (std::size_t i = 0; i < n; ++i) ey += (e[i] * y[i]) * (e[i] * y[i]);
    double lo = -emin * emin;
    double hi = -emin * emin + std::sqrt(ey);
    if (F(hi) > 0.0) hi += 1.0;
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (F(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < n; ++i) x[i] = e[i] * e[i] * y[i] / (t + e[i] * e[i]);
  }

  Point out(n);
  for (std::size_t i = 0; i < n; ++i) out[ord[i]] = std::copysign(x[i], p[ord[i]]);
  return out;
}

double DomainSpec::distance(std::span<const double> x) const {
  return std::visit(
      overloaded{
          [&](const Ball& b) { return b.radius - distance_between(x, b.center); },
          [&](const BallIntersection& b) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& c : b.centers) d = std::min(d, b.radius - distance_between(x, c));
            return d;
          },
          [&](const Annulus& a) {
            const double r = distance_between(x, a.center);
            return std::min(a.r_out - r, r - a.r_in);
          },
          [&](const Ellipse& e) {
            const Point p = sub(x, e.center);
            double level = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) level += (p[i] / e.semi_axes[i]) * (p[i] / e.semi_axes[i]);
            const Point f = ellipsoid_foot_point(e.semi_axes, p);
            const double d = distance_between(p, f);
            return level <= 1.0 ? d : -d;
          },
          [&](const HalfSpaceBox& h) {
            double d = std::min(x[0], 2.0 * h.half_width - x[0]);
            for (int i = 1; i < h.dim; ++i) d = std::min(d, h.half_width - std::abs(x[i]));
            return d;
          },
      },
      shape_);
}

bool DomainSpec::has_normals() const { return kind() != DomainKind::HalfSpaceBox; }

Point DomainSpec::normal(std::span<const double> z) const {
  return std::visit(
      overloaded{
          [&](const Ball& b) { return unit_or_e1(sub(z, b.center)); },
          [&](const BallIntersection& b) {
            std::size_t best = 0;
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < b.centers.size(); ++i) {
              const double d = b.radius - distance_between(z, b.centers[i]);
              if (d < dmin) dmin = d, best = i;
            }
            return unit_or_e1(sub(z, b.centers[best]));
          },
          [&](const Annulus& a) {
            Point v = unit_or_e1(sub(z, a.center));
            const double r = distance_between(z, a.center);
            if (r - a.r_in < a.r_out - r)
              for (auto& c : v) c = -c;
            return v;
          },
          [&](const Ellipse& e) {
            const Point f = ellipsoid_foot_point(e.semi_axes, sub(z, e.center));
            Point g(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] / (e.semi_axes[i] * e.semi_axes[i]);
            return unit_or_e1(std::move(g));
          },
          [&](const HalfSpaceBox&) -> Point {
            throw UnsupportedDomain("halfspace_box has no normal queries");
          },
      },
      shape_);
}

Point DomainSpec::lower() const {
  Point u = upper();
  return std::visit(overloaded{
                        [&](const Ball& b) { return sub(b.center, sub(u, b.center)); },
                        [&](const BallIntersection& b) {
                          // the intersection lies in every ball
                          Point lo(dim_, -std::numeric_limits<double>::infinity());
                          for (const auto& c : b.centers)
                            for (int i = 0; i < dim_; ++i) lo[i] = std::max(lo[i], c[i] - b.radius);
                          return lo;
                        },
                        [&](const Annulus& a) { return sub(a.center, sub(u, a.center)); },
                        [&](const Ellipse& e) { return sub(e.center, sub(u, e.center)); },
                        [&](const HalfSpaceBox& h) {
                          Point lo(dim_, -h.half_width);
                          lo[0] = 0.0;
                          return lo;
                        },
                    },
                    shape_);
}

Point DomainSpec::upper() const {
  return std::visit(overloaded{
                        [&](const Ball& b) {
                          Point u = b.center;
                          for (auto& c : u) c += b.radius;
                          return u;
                        },
                        [&](const BallIntersection& b) {
                          Point up(dim_, std::numeric_limits<double>::infinity());
                          for (const auto& c : b.centers)
                            for (int i = 0; i < dim_; ++i) up[i] = std::min(up[i], c[i] + b.radius);
                          return up;
                        },
                        [&](const Annulus& a) {
                          Point u = a.center;
                          for (auto& c : u) c += a.r_out;
                          return u;
                        },
                        [&](const Ellipse& e) {
                          Point u = e.center;
                          for (int i = 0; i < dim_; ++i) u[i] += e.semi_axes[i];
                          return u;
                        },
                        [&](const HalfSpaceBox& h) {
                          Point up(dim_, h.half_width);
                          up[0] = 2.0 * h.half_width;
                          return up;
                        },
                    },
                    shape_);
}

double DomainSpec::diameter() const {
  return std::visit(overloaded{
                        [&](const Ball& b) { return 2.0 * b.radius; },
                        [&](const BallIntersection&) { return 2.0 * radii().circumscribed; },
                        [&](const Annulus& a) { return 2.0 * a.r_out; },
                        [&](const Ellipse& e) { return 2.0 * *std::max_element(e.semi_axes.begin(), e.semi_axes.end()); },
                        [&](const HalfSpaceBox&) { return distance_between(lower(), upper()); },
                    },
                    shape_);
}

DomainSpec::Radii DomainSpec::radii() const {
  return std::visit(
      overloaded{
          [&](const Ball& b) { return Radii{b.radius, b.radius, b.center}; },
          [&](const BallIntersection& b) {
            const Point c = enclosing_center(b.centers);
            const double r1 = distance(c);
            double r2 = 0.0;
            for (const auto& z : boundary_samples(dim_ == 2 ? 4096 : 8192)) r2 = std::max(r2, distance_between(z, c));
            return Radii{r1, std::min(b.radius, r2 * (1.0 + 1e-6)), c};
          },
          [&](const Annulus& a) {
            Point c = a.center;
            c[0] += 0.5 * (a.r_in + a.r_out);
            return Radii{0.5 * (a.r_out - a.r_in), a.r_out, c};
          },
          [&](const Ellipse& e) {
            return Radii{*std::min_element(e.semi_axes.begin(), e.semi_axes.end()),
                         *std::max_element(e.semi_axes.begin(), e.semi_axes.end()), e.center};
          },
          [&](const HalfSpaceBox& h) {
            Point c(dim_, 0.0);
            c[0] = h.half_width;
            return Radii{h.half_width, distance_between(lower(), upper()) / 2.0, c};
          },
      },
      shape_);
}

std::vector<Point> DomainSpec::boundary_samples(int n) const {
  if (n < 1) throw InvalidInput("boundary_samples: n must be >= 1");
  return std::visit(
      overloaded{
          [&](const Ball& b) {
            auto pts = sphere_points(dim_, n);
            for (auto& p : pts)
              for (int i = 0; i < dim_; ++i) p[i] = b.center[i] + b.radius * p[i];
            return pts;
          },
          [&](const BallIntersection& b) {
            std::vector<Point> out;
            const int per = std::max(8, static_cast<int>(n / b.centers.size()) * 4);
            for (const auto& c : b.centers)
              for (auto p : sphere_points(dim_, per)) {
                for (int i = 0; i < dim_; ++i) p[i] = c[i] + b.radius * p[i];
                if (distance(p) >= -1e-12 * b.radius) out.push_back(std::move(p));
              }
            return out;
          },
          [&](const Annulus& a) {
            std::vector<Point> out;
            const int n_in = std::max(1, static_cast<int>(n * a.r_in / (a.r_in + a.r_out)));
            for (auto [r, m] : {std::pair{a.r_out, std::max(1, n - n_in)}, std::pair{a.r_in, n_in}})
              for (auto p : sphere_points(dim_, m)) {
                for (int i = 0; i < dim_; ++i) p[i] = a.center[i] + r * p[i];
                out.push_back(std::move(p));
              }
            return out;
          },
          [&](const Ellipse& e) {
            auto pts = sphere_points(dim_, n);
            for (auto& p : pts)
              for (int i = 0; i < dim_; ++i) p[i] = e.center[i] + e.semi_axes[i] * p[i];
            return pts;
          },
          [&](const HalfSpaceBox&) -> std::vector<Point> {
            throw UnsupportedDomain("halfspace_box has no boundary parametrization");
          },
      },
      shape_);
}

std::vector<Point> DomainSpec::interior_samples(int n, std::mt19937_64& rng) const {
  const Point lo = lower(), hi = upper();
  std::vector<std::uniform_real_distribution<double>> u;
  for (int i = 0; i < dim_; ++i) u.emplace_back(lo[i], hi[i]);
  std::vector<Point> out;
  out.reserve(n);
  Point p(dim_);
  while (static_cast<int>(out.size()) < n) {
    for (int i = 0; i < dim_; ++i) p[i] = u[i](rng);
    if (contains(p)) out.push_back(p);
  }
  return out;
}

bool DomainSpec::is_hula_hoop_candidate() const {
  const auto k = kind();
  return k == DomainKind::Ball || k == DomainKind::BallIntersection || k == DomainKind::Ellipse;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto pt = [&](const Point& p) {
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ")";
  };
  std::visit(overloaded{
                 [&](const Ball& b) {
                   os << "ball center=";
                   pt(b.center);
                   os << " r=" << b.radius;
                 },
                 [&](const BallIntersection& b) {
                   os << "ball_intersection r=" << b.radius << " centers=";
                   for (const auto& c : b.centers) pt(c);
                 },
                 [&](const Annulus& a) {
                   os << "annulus center=";
                   pt(a.center);
                   os << " r_in=" << a.r_in << " r_out=" << a.r_out;
                 },
                 [&](const Ellipse& e) {
                   os << "ellipse center=";
                   pt(e.center);
                   os << " axes=";
                   pt(e.semi_axes);
                 },
                 [&](const HalfSpaceBox& h) { os << "halfspace_box dim=" << h.dim << " L=" << h.half_width; },
             },
             shape_);
  return os.str();
}

// ---------------------------------------------------------------------------

HulaHoopReport hula_hoop_check(const DomainSpec& dom, double R, int n_boundary, int n_interior,
                               std::uint64_t seed) {
  if (!dom.has_normals()) throw UnsupportedDomain("hula_hoop_check: domain has no normal queries");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidInput("hula_hoop_check: R must be positive");
  if (n_boundary < 1 || n_interior < 0) throw InvalidInput("hula_hoop_check: bad sample counts");

  const auto zs = dom.boundary_samples(n_boundary);
  std::mt19937_64 rng(seed);
  auto xs = dom.interior_samples(n_interior, rng);
  xs.insert(xs.end(), zs.begin(), zs.end());

  HulaHoopReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const int n = dom.dim();
  Point c(n);
  for (const auto& z : zs) {
    const Point nu = dom.normal(z);
    for (int i = 0; i < n; ++i) c[i] = z[i] - R * nu[i];
    for (const auto& x : xs) {
      const double m = R - distance_between(x, c);
      ++rep.pairs;
      if (m < rep.worst_margin) {
        rep.worst_margin = m;
        rep.witness_boundary = z;
        rep.witness_point = x;
      }
    }
  }
  rep.pass = rep.worst_margin >= -tol::kHulaHoop;
  return rep;
}

std::vector<double> principal_curvatures(const DomainSpec& dom, std::span<const double> z) {
  const int n = dom.dim();
  return std::visit(
      overloaded{
          [&](const DomainSpec::Ball& b) { return std::vector<double>(n - 1, 1.0 / b.radius); },
          [&](const DomainSpec::BallIntersection& b) { return std::vector<double>(n - 1, 1.0 / b.radius); },
          [&](const DomainSpec::Annulus& a) {
            const double r = distance_between(z, a.center);
            const double k = (r - a.r_in < a.r_out - r) ? -1.0 / a.r_in : 1.0 / a.r_out;
            return std::vector<double>(n - 1, k);
          },
          [&](const DomainSpec::Ellipse& e) {
            // Shape operator of the level set phi = sum (x_i/a_i)^2: P D^2phi P / |grad phi| on the tangent space.
            const Point f = ellipsoid_foot_point(e.semi_axes, sub(z, e.center));
            Point g(n);
            for (int i = 0; i < n; ++i) g[i] = 2.0 * f[i] / (e.semi_axes[i] * e.semi_axes[i]);
            const double gn = norm(g);
            Point nu = g;
            for (auto& c : nu) c /= gn;
            SymMatrix s(n);
            for (int i = 0; i < n; ++i)
              for (int j = i; j < n; ++j) {
                double v = 0.0;
                for (int l = 0; l < n; ++l) {
                  const double pil = (i == l) - nu[i] * nu[l];
                  const double pjl = (j == l) - nu[j] * nu[l];
                  v += pil * (2.0 / (e.semi_axes[l] * e.semi_axes[l])) * pjl;
                }
                s.set(i, j, v / gn);
              }
            auto sd = spectral_decomposition(s);
            std::size_t skip = 0;
            double best = -1.0;
            for (std::size_t i = 0; i < sd.vectors.size(); ++i) {
              const double a = std::abs(dot(sd.vectors[i], nu));
              if (a > best) best = a, skip = i;
            }
            std::vector<double> out;
            for (std::size_t i = 0; i < sd.values.size(); ++i)
              if (i != skip) out.push_back(sd.values[i]);
            return out;
          },
          [&](const DomainSpec::HalfSpaceBox&) -> std::vector<double> {
            throw UnsupportedDomain("halfspace_box has no curvature queries");
          },
      },
      dom.shape());
}

CurvatureReport curvature_scan(const DomainSpec& dom, int n_samples) {
  if (!dom.has_normals()) throw UnsupportedDomain("curvature_scan: domain has no boundary parametrization");
  CurvatureReport rep;
  rep.kappa_min = std::numeric_limits<double>::infinity();
  for (const auto& z : dom.boundary_samples(n_samples))
    for (double k : principal_curvatures(dom, z))
      if (k < rep.kappa_min) {
        rep.kappa_min = k;
        rep.witness = z;
      }
  rep.nonconvex = !(rep.kappa_min > 0.0);
  if (!rep.nonconvex) rep.R_star = 1.0 / rep.kappa_min;
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> lattice_lines(int dim, int width) {
  if (dim != 2 && dim != 3) throw InvalidInput("lattice_lines: dimension must be 2 or 3");
  if (width < 1) throw InvalidInput("lattice_lines: width must be >= 1");
  std::vector<std::vector<int>> out;
  for (int a = 0; a < dim; ++a) {
    std::vector<int> e(dim, 0);
    e[a] = 1;
    out.push_back(e);
  }
  std::vector<int> v(dim, -width);
  while (true) {
    // canonical representative: first nonzero component positive
    int g = 0, first = 0, nz = 0;
    for (int c : v) {
      g = std::gcd(g, std::abs(c));
      if (c != 0) {
        if (nz == 0) first = c;
        ++nz;
      }
    }
    if (g == 1 && first > 0 && nz > 1) out.push_back(v);
    int i = dim - 1;
    while (i >= 0 && v[i] == width) v[i--] = -width;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

std::vector<int> Grid::multi_index(std::size_t node) const {
  std::vector<int> idx(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(node % extent_[i]);
    node /= extent_[i];
  }
  return idx;
}

Point Grid::position(std::size_t node) const {
  const auto idx = multi_index(node);
  Point p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = origin_[i] + idx[i] * h_;
  return p;
}

std::vector<int> Grid::direction(int d) const {
  std::vector<int> e = lines_[d / 2];
  if (d % 2)
    for (auto& c : e) c = -c;
  return e;
}

std::size_t Grid::interior_count() const {
  return static_cast<std::size_t>(std::count(cls_.begin(), cls_.end(), NodeClass::Interior));
}

std::size_t Grid::cut_count() const {
  return static_cast<std::size_t>(std::count(cls_.begin(), cls_.end(), NodeClass::Cut));
}

Grid build_grid(const DomainSpec& dom, double h, int stencil_width) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("build_grid: h must be positive");
  if (stencil_width < 1) throw InvalidInput("build_grid: stencil width must be >= 1");

  Grid g(dom);
  const int n = dom.dim();
  g.dim_ = n;
  g.h_ = h;
  g.width_ = stencil_width;
  g.lines_ = lattice_lines(n, stencil_width);

  const Point lo = dom.lower(), hi = dom.upper();
  std::vector<long> first(n);
  g.origin_.resize(n);
  g.extent_.resize(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    first[i] = static_cast<long>(std::floor(lo[i] / h)) - 1;
    const long last = static_cast<long>(std::ceil(hi[i] / h)) + 1;
    g.origin_[i] = first[i] * h;
    g.extent_[i] = static_cast<int>(last - first[i] + 1);
    total *= g.extent_[i];
  }
  if (total > 200'000'000u) throw ConfigurationError("build_grid: grid too large");

  g.cls_.assign(total, NodeClass::Exterior);
  g.dist_.assign(total, 0.0);
  g.active_index_.assign(total, -1);
  const double inside = tol::kInsideFraction * h;
  for (std::size_t node = 0; node < total; ++node) {
    const double d = dom.distance(g.position(node));
    g.dist_[node] = d;
    if (d >= inside) {
      g.active_index_[node] = static_cast<int>(g.active_.size());
      g.active_.push_back(static_cast<int>(node));
      g.cls_[node] = NodeClass::Interior;
    }
  }
  if (g.active_.empty()) throw ConfigurationError("build_grid: no grid node lies inside the domain (h too coarse)");

  // Segments between two inside points stay inside a convex domain.
  const bool convex = dom.kind() != DomainKind::Annulus;
  const int nd = g.direction_count();
  g.arms_.assign(g.active_.size() * nd, Arm{});
  std::vector<long> stride(n);
  stride[n - 1] = 1;
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * g.extent_[i + 1];

  Point x(n), y(n), p(n);
  for (std::size_t a = 0; a < g.active_.size(); ++a) {
    const int node = g.active_[a];
    const auto idx = g.multi_index(node);
    x = g.position(node);
    bool cut = false;
    for (int d = 0; d < nd; ++d) {
      const auto e = g.direction(d);
      bool on_grid = true;
      long q = 0;
      for (int i = 0; i < n; ++i) {
        const long j = idx[i] + e[i];
        if (j < 0 || j >= g.extent_[i]) on_grid = false;
        q += j * stride[i];
      }
      for (int i = 0; i < n; ++i) y[i] = x[i] + e[i] * h;
      auto point_at = [&](double t) {
        for (int i = 0; i < n; ++i) p[i] = x[i] + t * (y[i] - x[i]);
        return dom.distance(p);
      };

      Arm arm;
      double t_out = -1.0;  // a parameter known to be outside, or -1
      if (on_grid && g.active_index_[q] >= 0) {
        arm.neighbor = g.active_index_[q];
        if (!convex) {
          for (int s = 1; s < 16; ++s)
            if (point_at(s / 16.0) <= 0.0) {
              t_out = s / 16.0;
              break;
            }
        }
      } else {
        t_out = point_at(1.0) > 0.0 ? -1.0 : 1.0;
        if (t_out < 0.0) arm.theta = 1.0;  // the node sits just inside the tolerance band
      }
      if (t_out > 0.0 || arm.neighbor < 0) {
        arm.neighbor = -1;
        cut = true;
        if (t_out > 0.0) {
          double tl = 0.0, th = t_out;
          if (!convex) {
            // first outside sample along the segment
            for (int s = 1; s < 16; ++s)
              if (s / 16.0 < th && point_at(s / 16.0) <= 0.0) {
                th = s / 16.0;
                break;
              }
            tl = 0.0;
            for (int s = 1; s < 16 && s / 16.0 < th; ++s) tl = s / 16.0;
          }
          int e2 = 0;
          for (int c : e) e2 += c * c;
          const double arm_len = h * std::sqrt(static_cast<double>(e2));
          while ((th - tl) * arm_len > tol::kCrossingFraction * h) {
            const double mid = 0.5 * (tl + th);
            if (mid <= tl || mid >= th) break;
            if (point_at(mid) > 0.0)
              tl = mid;
            else
              th = mid;
          }
          arm.theta = std::clamp(0.5 * (tl + th), std::numeric_limits<double>::min(), 1.0);
        }
      }
      g.arms_[a * nd + d] = arm;
    }
    if (cut) g.cls_[node] = NodeClass::Cut;
  }
  return g;
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace trunclap
