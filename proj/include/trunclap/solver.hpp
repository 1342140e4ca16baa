#pragma once

#include <string>
#include <vector>

#include "trunclap/problem.hpp"
#include "trunclap/scheme.hpp"

namespace trunclap {

enum class SolveStatus { Converged, Diverged, MaxIter };
enum class SolveMethod { Auto, Explicit, Policy };

const char* to_string(SolveStatus s);
const char* to_string(SolveMethod m);

struct SolveOptions {
  double tol = 1e-8;          // on sup |F_h[u]|
  long max_iter = 0;          // explicit steps; 0 means 10 (diam/h)^2
  double blowup_norm = 1e6;
  SolveMethod method = SolveMethod::Auto;
  int max_policy_iter = 60;
};

struct SolveResult {
  GridField u;
  SolveStatus status = SolveStatus::MaxIter;
  long iterations = 0;
  double residual = 0.0;
  double sup_norm = 0.0;
  double lipschitz = 0.0;
  double boundary_ratio = 0.0;
  SolveMethod method = SolveMethod::Explicit;
  std::string detail;
  Policy policy;  // final linearization (policy method only)
};

/// Monotone solve of F_h[u] = 0. Auto runs policy iteration with an inverse-positivity check
/// on every linear system and falls back to explicit pseudo-time stepping when the check
/// fails outside the sign-definite regime. `warm` seeds the policy iteration.
SolveResult solve_dirichlet(const Discretization& disc, const SolveOptions& opt = {}, const Policy* warm = nullptr);
SolveResult solve_dirichlet(const ProblemSpec& prob, const SolveOptions& opt = {});

/// One Jacobi pseudo-time step u <- u + tau_x F_h[u](x) with tau_x = 0.9 / (diag_bound(x) + |mu|).
void euler_step(const Discretization& disc, std::span<double> u);

struct LipschitzEstimate {
  double value = 0.0;
  std::vector<double> shells;  // max quotient from nodes with distance in [i h, (i+1) h)
};

/// Largest |u(x) - u(y)| / |x - y| over nodes within two index steps, and over boundary
/// crossings where u = 0.
LipschitzEstimate lipschitz_estimate(const GridField& u, int shells = 4);

/// Largest |u(x)| / d(x) over cut nodes.
double boundary_growth(const GridField& u);

}  // namespace trunclap
