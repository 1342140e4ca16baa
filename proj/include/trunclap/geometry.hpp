#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trunclap/field.hpp"

namespace trunclap {

enum class DomainKind { Ball, BallIntersection, Annulus, Ellipse, HalfSpaceBox };

const char* to_string(DomainKind k);

/// Analytic domain in R^2 or R^3 with signed distance (positive inside) and outward normals.
class DomainSpec {
 public:
  struct Ball {
    Point center;
    double radius;
  };
  struct BallIntersection {
    std::vector<Point> centers;
    double radius;
  };
  struct Annulus {
    Point center;
    double r_in, r_out;
  };
  struct Ellipse {
    Point center;
    std::vector<double> semi_axes;
  };
  /// {0 < x_1 < L, |x_i| < L for i > 1}: a bounded window onto the half-space x_1 > 0.
  struct HalfSpaceBox {
    int dim;
    double half_width;
  };

  static DomainSpec ball(Point center, double radius);
  /// Throws InvalidInput if the intersection has no point with positive margin.
  static DomainSpec ball_intersection(std::vector<Point> centers, double radius);
  static DomainSpec annulus(Point center, double r_in, double r_out);
  static DomainSpec ellipse(Point center, std::vector<double> semi_axes);
  static DomainSpec halfspace_box(int dim, double half_width);

  DomainKind kind() const;
  int dim() const { return dim_; }
  const auto& shape() const { return shape_; }

  double distance(std::span<const double> x) const;
  bool contains(std::span<const double> x) const { return distance(x) > 0.0; }

  bool has_normals() const;
  /// Outward unit normal at the boundary point nearest to z.
  Point normal(std::span<const double> z) const;

  Point lower() const;
  Point upper() const;
  double diameter() const;

  /// Radii with B_{r1}(c1) inside the domain and the domain inside B_{r2}(c2).
  struct Radii {
    double inscribed;
    double circumscribed;
    Point inscribed_center;
  };
  Radii radii() const;

  /// Roughly n points spread over the boundary (not available for HalfSpaceBox).
  std::vector<Point> boundary_samples(int n) const;
  /// n uniform points from the interior (rejection sampling in the bounding box).
  std::vector<Point> interior_samples(int n, std::mt19937_64& rng) const;

  /// True for convex domains that belong to some class C_R (ball, ellipse, ball intersection).
  bool is_hula_hoop_candidate() const;

  std::string describe() const;

 private:
  using Shape = std::variant<Ball, BallIntersection, Annulus, Ellipse, HalfSpaceBox>;
  DomainSpec(int dim, Shape s) : dim_(dim), shape_(std::move(s)) {}

  int dim_;
  Shape shape_;
};

/// Nearest point on the ellipsoid sum (x_i/a_i)^2 = 1 to p (coordinates relative to the center).
Point ellipsoid_foot_point(std::span<const double> semi_axes, std::span<const double> p);

struct HulaHoopReport {
  bool pass = true;
  double worst_margin = 0.0;  // min over pairs of R - |x - (z - R nu(z))|
  Point witness_boundary;     // z
  Point witness_point;        // x
  int pairs = 0;
};

/// Tests Omega subset B_R(z - R nu(z)) for sampled boundary points z and points x of the closure.
HulaHoopReport hula_hoop_check(const DomainSpec& dom, double R, int n_boundary, int n_interior,
                               std::uint64_t seed = 7u);

struct CurvatureReport {
  double kappa_min = 0.0;
  std::optional<double> R_star;  // 1 / kappa_min when kappa_min > 0
  bool nonconvex = false;
  Point witness;
};

CurvatureReport curvature_scan(const DomainSpec& dom, int n_samples);

/// Principal curvatures (relative to the inward side) at the boundary point nearest to z.
std::vector<double> principal_curvatures(const DomainSpec& dom, std::span<const double> z);

// ---------------------------------------------------------------------------
// Cartesian grids

enum class NodeClass : std::uint8_t { Exterior, Interior, Cut };

const char* to_string(NodeClass c);

/// Integer lattice vectors with coprime components and max-norm <= width, one per +/- pair,
/// axis vectors first. Direction 2*i is +lines[i], direction 2*i+1 is -lines[i].
std::vector<std::vector<int>> lattice_lines(int dim, int width);

/// One stencil arm from an active node: either a neighbouring active node or a boundary
/// crossing at fraction theta of the arm length.
struct Arm {
  std::int32_t neighbor = -1;  // active index, -1 when the arm is cut
  double theta = 1.0;
};

class Grid {
 public:
  int dim() const { return dim_; }
  double h() const { return h_; }
  int width() const { return width_; }
  const Point& origin() const { return origin_; }
  const std::vector<int>& extent() const { return extent_; }
  const DomainSpec& domain() const { return domain_; }

  std::size_t node_count() const { return cls_.size(); }
  std::size_t active_count() const { return active_.size(); }
  NodeClass node_class(std::size_t node) const { return cls_[node]; }
  /// Active index -> node id.
  int active_node(std::size_t a) const { return active_[a]; }
  /// Node id -> active index, or -1 for exterior nodes.
  int active_index(std::size_t node) const { return active_index_[node]; }
  NodeClass active_class(std::size_t a) const { return cls_[active_[a]]; }

  std::vector<int> multi_index(std::size_t node) const;
  Point position(std::size_t node) const;
  Point active_position(std::size_t a) const { return position(active_[a]); }
  double active_distance(std::size_t a) const { return dist_[active_[a]]; }

  const std::vector<std::vector<int>>& lines() const { return lines_; }
  int direction_count() const { return static_cast<int>(lines_.size()) * 2; }
  /// Integer offset of direction d.
  std::vector<int> direction(int d) const;
  const Arm& arm(std::size_t a, int d) const { return arms_[a * direction_count() + d]; }

  std::size_t interior_count() const;
  std::size_t cut_count() const;

 private:
  friend Grid build_grid(const DomainSpec& dom, double h, int stencil_width);
  explicit Grid(DomainSpec d) : domain_(std::move(d)) {}

  DomainSpec domain_;
  int dim_ = 0;
  double h_ = 0.0;
  int width_ = 1;
  Point origin_;
  std::vector<int> extent_;
  std::vector<NodeClass> cls_;
  std::vector<double> dist_;
  std::vector<int> active_;
  std::vector<int> active_index_;
  std::vector<std::vector<int>> lines_;
  std::vector<Arm> arms_;
};

/// Builds the node classification and stencil arms. Throws InvalidInput for h <= 0 or
/// stencil_width < 1 and ConfigurationError when no node lands inside the domain.
Grid build_grid(const DomainSpec& dom, double h, int stencil_width);

/// Grid function on the active (interior and cut) nodes. Values outside are the Dirichlet datum 0.
struct GridField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(std::shared_ptr<const Grid> g, double fill = 0.0)
      : grid(std::move(g)), values(grid->active_count(), fill) {}

  double sup_norm() const;
};

}  // namespace trunclap
