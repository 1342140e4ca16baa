#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "trunclap/geometry.hpp"
#include "trunclap/problem.hpp"

namespace trunclap {

/// Lattice directions and the orthogonal k-frames drawn from them.
struct StencilSet {
  int dim = 0;
  int k = 0;
  std::vector<std::vector<int>> lines;  // one per +/- pair
  std::vector<Point> units;
  std::vector<double> lengths;          // |e|, in units of h
  std::vector<std::vector<int>> frames; // indices into lines; frames[0] is the axis frame

  /// All k-tuples of mutually orthogonal lines (integer dot product 0). For k = dim only
  /// the axis frame is kept.
  static StencilSet make(int dim, int width, int k);
};

/// Second difference along a line with arm fractions theta_minus, theta_plus and arm length L:
/// (2/L^2) (u+/(t+(t+ + t-)) - u0/(t+ t-) + u-/(t-(t+ + t-))).
double cut_second_difference(double u_minus, double u0, double u_plus, double theta_minus, double theta_plus,
                             double L);

/// Per-node choice for a frozen linearization: which frame attains the min/max, and which
/// gradient direction (or -1 for the zero branch / linear terms).
struct Policy {
  std::vector<int> frame;
  std::vector<int> grad;
  bool empty() const { return frame.empty(); }
};

/// F_h[u](x) = P_{k,h}(D^2u)(x) + H_h(x, Du)(x) + mu u(x) - f(x) on the active nodes of a grid.
class Discretization {
 public:
  Discretization(std::shared_ptr<const Grid> grid, const ProblemSpec& prob);
  explicit Discretization(const ProblemSpec& prob);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const StencilSet& stencils() const { return st_; }
  const SchemeConfig& config() const { return cfg_; }
  const HamiltonianSpec& hamiltonian() const { return H_; }
  std::size_t size() const { return grid_->active_count(); }

  double mu() const { return mu_; }
  void set_mu(double mu) { mu_ = mu; }
  const std::vector<double>& forcing() const { return f_; }
  void set_forcing(const ScalarField& f);
  void set_forcing_values(std::vector<double> f);

  double second_diff(std::span<const double> u, std::size_t a, int line) const;
  double apply_pk(std::span<const double> u, std::size_t a, int* frame = nullptr) const;
  double apply_h(std::span<const double> u, std::size_t a, int* grad = nullptr) const;
  double apply_full(std::span<const double> u, std::size_t a) const;
  /// F_h[u] at every active node.
  void residual(std::span<const double> u, std::span<double> out) const;

  /// Largest possible |dF/du(x)| from the second-order and gradient parts (mu excluded).
  double diag_bound(std::size_t a) const { return diag_bound_[a]; }

  /// True when F_h is a min (concave) / max (convex) of linear maps.
  bool concave() const { return concave_; }
  bool convex() const { return convex_; }
  /// False when the gradient term is not piecewise linear (central-regularized variant).
  bool linearizable() const { return cfg_.gradient == GradientScheme::Upwind; }

  Policy policy(std::span<const double> u) const;
  /// Switches a node's choice only if the new one improves its value beyond roundoff.
  /// Returns the number of nodes that changed.
  std::size_t improve_policy(std::span<const double> u, Policy& p) const;
  /// Row of the linear map selected by (frame, grad) at node a, excluding mu: off-diagonal
  /// (active index, coefficient) pairs are appended to `row`, the diagonal is returned.
  double linear_row(std::size_t a, int frame, int grad, std::vector<std::pair<int, double>>& row) const;

 private:
  struct LineCoef {
    int plus, minus;  // active indices or -1
    double cp, c0, cm;
  };
  double frame_value(std::span<const double> u, std::size_t a, int frame) const;
  double line_value(std::span<const double> u, std::size_t a, int line) const;
  double grad_diff(std::span<const double> u, std::size_t a, int d) const;
  double grad_value(std::span<const double> u, std::size_t a, int d) const;

  std::shared_ptr<const Grid> grid_;
  SchemeConfig cfg_;
  HamiltonianSpec H_;
  StencilSet st_;
  double mu_ = 0.0;
  std::vector<double> f_;
  std::vector<double> coef_;   // signed norm coefficient per node
  std::vector<double> drift_;  // dim values per node
  std::vector<LineCoef> lc_;   // per node, per line
  std::vector<double> inv_arm_;  // 1/(theta L) per node, per direction
  std::vector<double> diag_bound_;
  double lf_alpha_ = 0.0;
  bool concave_ = false, convex_ = false;
};

/// Convenience wrappers over a grid function.
double second_diff(const Discretization& disc, const GridField& u, std::size_t a, int line);
double apply_pk(const Discretization& disc, const GridField& u, std::size_t a);
double apply_full(const Discretization& disc, const GridField& u, std::size_t a);

}  // namespace trunclap
