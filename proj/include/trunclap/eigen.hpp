#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trunclap/analytic.hpp"
#include "trunclap/problem.hpp"
#include "trunclap/solver.hpp"

namespace trunclap {

enum class Classification { Below, Above };

const char* to_string(Classification c);

struct BisectionStep {
  double mu = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  Classification cls = Classification::Above;
  double sup_norm = 0.0;
  long iterations = 0;
};

struct EigenOptions {
  double tol_mu = 0.02;
  SolveOptions solve;
  int max_steps = 200;  // bisection and bracket-expansion steps together
};

struct EigenEstimate {
  double mu_lo = 0.0, mu_hi = 0.0, mu_mid = 0.0;
  GridField eigenfunction;  // u / |u|_inf at mu_lo
  double bound_lo = 0.0, bound_hi = 0.0;
  bool bound_lo_finite = true;
  std::vector<BisectionStep> history;
  bool domain_outside_C_R = false;  // advisory: no a-priori guarantee for this domain
  bool experimental = false;        // k > 1
};

/// Bisection on mu with probe forcing f = 1, starting from the a-priori bracket widened by
/// a factor two on each side. mu is BELOW when the solve converges with sup |u| under the
/// blow-up threshold and u <= 0, ABOVE otherwise. prob.mu and prob.f are ignored.
/// Throws BracketFailure when both ends classify the same way.
EigenEstimate estimate_mu_minus(const ProblemSpec& prob, const EigenOptions& opt = {});

/// Classifies a single mu with f = 1.
BisectionStep classify_mu(const Discretization& disc, double mu, const SolveOptions& opt);

struct EigenfunctionReport {
  bool nonpositive = false;  // max <= 1e-8
  double max_value = 0.0;
  double min_value = 0.0;
  bool strictly_negative = false;  // every node with d >= 4h below -1e-6
  double deep_max = 0.0;           // largest value over nodes with d >= 4h
  int deep_nodes = 0;
  bool normalized = false;  // |v|_inf == 1
  std::optional<double> reference_error;  // sup |v - ref / |ref|_inf| over active nodes
  bool pass = false;
};

EigenfunctionReport eigenfunction_check(const EigenEstimate& est, const ClosedForm* reference = nullptr,
                                        double ref_tol = 0.05);

struct ProbeRow {
  double mu = 0.0;
  double forcing = 1.0;  // +1 primal probe, -1 dual probe
  SolveStatus status = SolveStatus::MaxIter;
  double max_value = 0.0, min_value = 0.0;
  bool sign_ok = false;  // primal: u <= 1e-8; dual: u >= -1e-8
  Classification cls = Classification::Above;  // Below iff converged and sign_ok
};

/// Solves with f = 1 for each mu in mu_list and with f = -1 for each mu in dual_mu_list.
std::vector<ProbeRow> max_principle_probe(const ProblemSpec& prob, const std::vector<double>& mu_list,
                                          const std::vector<double>& dual_mu_list = {},
                                          const SolveOptions& opt = {});

}  // namespace trunclap
