#include "trunclap/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "trunclap/errors.hpp"

namespace trunclap {

namespace {

constexpr double kSignTol = 1e-8;

struct Probe {
  BisectionStep step;
  SolveResult res;
};

Probe run_probe(const Discretization& disc, double mu, const SolveOptions& opt, const Policy* warm) {
  const_cast<Discretization&>(disc).set_mu(mu);
  Probe p;
  p.res = solve_dirichlet(disc, opt, warm);
  p.step.mu = mu;
  p.step.status = p.res.status;
  p.step.sup_norm = p.res.sup_norm;
  p.step.iterations = p.res.iterations;
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : p.res.u.values) mx = std::max(mx, v);
  const bool bounded = p.res.status == SolveStatus::Converged && p.res.sup_norm < opt.blowup_norm;
  const bool sign = mx <= kSignTol * std::max(1.0, p.res.sup_norm);
  p.step.cls = bounded && sign ? Classification::Below : Classification::Above;
  return p;
}

// Radius R of a class C_R the domain is known to belong to, if any.
std::optional<double> hula_hoop_radius(const DomainSpec& dom) {
  if (!dom.is_hula_hoop_candidate()) return std::nullopt;
  if (const auto* b = std::get_if<DomainSpec::Ball>(&dom.shape())) return b->radius;
  if (const auto* b = std::get_if<DomainSpec::BallIntersection>(&dom.shape())) return b->radius;
  return curvature_scan(dom, 720).R_star;
}

}  // namespace

const char* to_string(Classification c) { return c == Classification::Below ? "below" : "above"; }

BisectionStep classify_mu(const Discretization& disc, double mu, const SolveOptions& opt) {
  return run_probe(disc, mu, opt, nullptr).step;
}

EigenEstimate estimate_mu_minus(const ProblemSpec& prob_in, const EigenOptions& opt) {
  if (!(opt.tol_mu > 0.0)) throw InvalidInput("estimate_mu_minus: tol_mu must be positive");
  ProblemSpec prob = prob_in;
  prob.mu = 0.0;
  prob.f = ScalarField::constant(1.0);
  prob.validate();
  Discretization disc(prob);

  EigenEstimate est;
  const int k = prob.scheme.k;
  const double b = prob.H.b_bound;
  const auto radii = prob.domain.radii();
  const auto cb = corollary_bounds(k, b, radii.inscribed, radii.circumscribed);
  est.bound_lo = cb.lower;
  est.bound_lo_finite = cb.lower_finite;
  est.bound_hi = cb.upper;
  est.experimental = k > 1;
  const auto R = hula_hoop_radius(prob.domain);
  est.domain_outside_C_R = !R || b * *R >= k;

  double hi = 2.0 * cb.upper;
  double lo = (cb.lower_finite && cb.lower > 0.0) ? 0.5 * cb.lower : -hi;
  const bool may_expand = !cb.lower_finite || est.domain_outside_C_R;

  int steps = 0;
  Policy warm;
  GridField best;
  auto probe = [&](double mu) {
    ++steps;
    auto p = run_probe(disc, mu, opt.solve, warm.empty() ? nullptr : &warm);
    est.history.push_back(p.step);
    if (p.step.cls == Classification::Below) {
      if (p.res.method == SolveMethod::Policy) warm = p.res.policy;
      best = std::move(p.res.u);
    }
    return p.step.cls;
  };

  auto lo_cls = probe(lo);
  while (lo_cls == Classification::Above && may_expand && steps < 8) {
    lo -= 2.0 * (hi - lo);
    lo_cls = probe(lo);
  }
  auto hi_cls = probe(hi);
  while (hi_cls == Classification::Below && may_expand && steps < 16) {
    lo = hi;
    hi *= 4.0;
    hi_cls = probe(hi);
  }
  if (lo_cls == hi_cls || lo_cls != Classification::Below) {
    std::ostringstream os;
    os << "eigen bracket [" << lo << ", " << hi << "] classified " << to_string(lo_cls) << "/" << to_string(hi_cls);
    throw BracketFailure(os.str(), lo, hi, lo_cls == Classification::Below, hi_cls == Classification::Below);
  }
  // best holds the solution at lo; keep it in step with the bracket
  GridField at_lo = best;
  while (hi - lo > opt.tol_mu && steps < opt.max_steps) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) == Classification::Below) {
      lo = mid;
      at_lo = best;
    } else {
      hi = mid;
    }
  }
  est.mu_lo = lo;
  est.mu_hi = hi;
  est.mu_mid = 0.5 * (lo + hi);
  est.eigenfunction = at_lo;
  const double s = at_lo.sup_norm();
  if (s > 0.0)
    for (double& v : est.eigenfunction.values) v /= s;
  return est;
}

EigenfunctionReport eigenfunction_check(const EigenEstimate& est, const ClosedForm* reference, double ref_tol) {
  EigenfunctionReport rep;
  const GridField& v = est.eigenfunction;
  if (!v.grid || v.values.empty()) return rep;
  const Grid& g = *v.grid;
  rep.max_value = *std::max_element(v.values.begin(), v.values.end());
  rep.min_value = *std::min_element(v.values.begin(), v.values.end());
  rep.nonpositive = rep.max_value <= kSignTol;
  rep.normalized = std::abs(v.sup_norm() - 1.0) <= 1e-15;
  rep.deep_max = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < g.active_count(); ++a) {
    if (g.active_distance(a) < 4.0 * g.h()) continue;
    ++rep.deep_nodes;
    rep.deep_max = std::max(rep.deep_max, v.values[a]);
  }
  rep.strictly_negative = rep.deep_nodes > 0 && rep.deep_max < -1e-6;
  rep.pass = rep.nonpositive && rep.strictly_negative && rep.normalized;

  if (reference) {
    std::vector<double> r(g.active_count());
    double big = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) {
      r[a] = reference->value(g.active_position(a));
      if (std::abs(r[a]) > std::abs(big)) big = r[a];
    }
    if (big != 0.0) {
      // match the normalization and the sign of the computed eigenfunction
      const double scale = (rep.min_value < 0.0) == (big < 0.0) ? std::abs(big) : -std::abs(big);
      double err = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) err = std::max(err, std::abs(v.values[a] - r[a] / scale));
      rep.reference_error = err;
      rep.pass = rep.pass && err <= ref_tol;
    } else {
      rep.pass = false;
    }
  }
  return rep;
}

std::vector<ProbeRow> max_principle_probe(const ProblemSpec& prob_in, const std::vector<double>& mu_list,
                                          const std::vector<double>& dual_mu_list, const SolveOptions& opt) {
  ProblemSpec prob = prob_in;
  prob.validate();
  auto grid = std::make_shared<const Grid>(build_grid(prob.domain, prob.h, prob.scheme.width));
  std::vector<ProbeRow> rows;
  auto run = [&](double mu, double forcing) {
    prob.mu = mu;
    prob.f = ScalarField::constant(forcing);
    Discretization disc(grid, prob);
    const auto res = solve_dirichlet(disc, opt);
    ProbeRow row;
    row.mu = mu;
    row.forcing = forcing;
    row.status = res.status;
    row.max_value = *std::max_element(res.u.values.begin(), res.u.values.end());
    row.min_value = *std::min_element(res.u.values.begin(), res.u.values.end());
    row.sign_ok = forcing > 0.0 ? row.max_value <= kSignTol : row.min_value >= -kSignTol;
    row.cls = res.status == SolveStatus::Converged && row.sign_ok ? Classification::Below : Classification::Above;
    rows.push_back(row);
  };
  for (double mu : mu_list) run(mu, 1.0);
  for (double mu : dual_mu_list) run(mu, -1.0);
  return rows;
}

}  // namespace trunclap
