#include "trunclap/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "trunclap/errors.hpp"

namespace trunclap {

namespace {

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Absolute roundoff level of F_h at magnitude sup|u|: the stencil coefficients are O(1/h^2),
// so residuals below this are indistinguishable from zero.
double roundoff_floor(const Discretization& disc, double usup) {
  double d = 0.0;
  for (std::size_t a = 0; a < disc.size(); ++a) d = std::max(d, disc.diag_bound(a));
  return 64.0 * std::numeric_limits<double>::epsilon() * (d + std::abs(disc.mu())) * usup;
}

struct Outcome {
  SolveStatus status;
  long iterations;
  std::string detail;
};

bool sign_definite(const Discretization& disc) {
  const auto& f = disc.forcing();
  const double fmin = *std::min_element(f.begin(), f.end());
  const double fmax = *std::max_element(f.begin(), f.end());
  return (disc.concave() && fmin >= 0.0) || (disc.convex() && fmax <= 0.0);
}

Eigen::SparseMatrix<double> assemble(const Discretization& disc, const Policy& p) {
  const std::size_t n = disc.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * 6);
  std::vector<std::pair<int, double>> row;
  for (std::size_t a = 0; a < n; ++a) {
    row.clear();
    const double diag = disc.linear_row(a, p.frame[a], p.grad[a], row);
    trip.emplace_back(static_cast<int>(a), static_cast<int>(a), diag + disc.mu());
    for (auto [j, c] : row) trip.emplace_back(static_cast<int>(a), j, c);
  }
  Eigen::SparseMatrix<double> A(static_cast<long>(n), static_cast<long>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

// Policy iteration. Returns nullopt when the caller should fall back to explicit stepping,
// leaving in `u` the iterate to start from.
std::optional<Outcome> howard(const Discretization& disc, const SolveOptions& opt, std::vector<double>& u,
                              Policy& p) {
  const std::size_t n = disc.size();
  const bool definite = sign_definite(disc);
  Eigen::Map<const Eigen::VectorXd> f(disc.forcing().data(), static_cast<long>(n));
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(static_cast<long>(n), -1.0);
  std::vector<double> F(n);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;

  for (int it = 1; it <= opt.max_policy_iter; ++it) {
    const auto A = assemble(disc, p);
    lu.compute(A);
    bool certified = lu.info() == Eigen::Success;
    Eigen::VectorXd x, y;
    if (certified) {
      x = lu.solve(f);
      y = lu.solve(ones);
      certified = lu.info() == Eigen::Success && x.allFinite() && (y.array() > 0.0).all();
    }
    if (!certified) {
      if (definite)
        return Outcome{SolveStatus::Diverged, it,
                       "linearized operator is not inverse-positive at this mu (principal eigenvalue crossed)"};
      std::fill(u.begin(), u.end(), 0.0);
      return std::nullopt;
    }
    std::copy(x.data(), x.data() + n, u.begin());
    const double usup = sup_abs(u);
    if (usup >= opt.blowup_norm) return Outcome{SolveStatus::Diverged, it, "sup norm exceeded the blow-up threshold"};
    disc.residual(u, F);
    if (sup_abs(F) <= opt.tol + roundoff_floor(disc, usup)) return Outcome{SolveStatus::Converged, it, "policy iteration"};
    if (disc.improve_policy(u, p) == 0) return std::nullopt;  // stalled above tolerance
  }
  return std::nullopt;
}

Outcome explicit_iteration(const Discretization& disc, const SolveOptions& opt, long max_iter, std::vector<double>& u) {
  const std::size_t n = disc.size();
  std::vector<double> tau(n), F(n);
  for (std::size_t a = 0; a < n; ++a) {
    const double L = disc.diag_bound(a) + std::abs(disc.mu());
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigurationError("explicit iteration: nonpositive pseudo-time step");
    tau[a] = 0.9 / L;
  }
  const double floor_unit = roundoff_floor(disc, 1.0);
  for (long it = 0; it <= max_iter; ++it) {
    disc.residual(u, F);
    const double usup = sup_abs(u);
    if (sup_abs(F) <= opt.tol + floor_unit * usup) return {SolveStatus::Converged, it, "explicit pseudo-time"};
    if (usup >= opt.blowup_norm || !std::isfinite(usup))
      return {SolveStatus::Diverged, it, "sup norm exceeded the blow-up threshold"};
    if (it == max_iter) break;
    for (std::size_t a = 0; a < n; ++a) u[a] += tau[a] * F[a];
  }
  return {SolveStatus::MaxIter, max_iter, "iteration budget exhausted"};
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::Diverged:
      return "diverged";
    case SolveStatus::MaxIter:
      return "max-iter";
  }
  return "?";
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Auto:
      return "auto";
    case SolveMethod::Explicit:
      return "explicit";
    case SolveMethod::Policy:
      return "policy";
  }
  return "?";
}

void euler_step(const Discretization& disc, std::span<double> u) {
  std::vector<double> F(disc.size());
  disc.residual(u, F);
  for (std::size_t a = 0; a < disc.size(); ++a) {
    const double L = disc.diag_bound(a) + std::abs(disc.mu());
    if (!(L > 0.0)) throw ConfigurationError("euler_step: nonpositive pseudo-time step");
    u[a] += 0.9 / L * F[a];
  }
}

SolveResult solve_dirichlet(const ProblemSpec& prob, const SolveOptions& opt) {
  Discretization disc(prob);
  return solve_dirichlet(disc, opt);
}

SolveResult solve_dirichlet(const Discretization& disc, const SolveOptions& opt, const Policy* warm) {
  if (!(opt.tol > 0.0)) throw ConfigurationError("solve_dirichlet: tol must be positive");
  if (!(opt.blowup_norm > 0.0)) throw ConfigurationError("solve_dirichlet: blowup_norm must be positive");
  const std::size_t n = disc.size();
  const double ratio = disc.grid().domain().diameter() / disc.grid().h();
  const long max_iter = opt.max_iter > 0 ? opt.max_iter : static_cast<long>(std::ceil(10.0 * ratio * ratio));

  SolveResult res;
  res.u = GridField(disc.grid_ptr());
  std::vector<double>& u = res.u.values;
  std::vector<double> F(n);
  disc.residual(u, F);

  Outcome out{SolveStatus::MaxIter, 0, ""};
  bool done = false;
  if (sup_abs(F) <= opt.tol) {
    out = {SolveStatus::Converged, 0, "zero is a discrete solution"};
    res.method = SolveMethod::Explicit;
    done = true;
  }

  SolveMethod method = opt.method;
  if (method == SolveMethod::Auto) method = disc.linearizable() ? SolveMethod::Policy : SolveMethod::Explicit;
  if (method == SolveMethod::Policy && !disc.linearizable())
    throw ConfigurationError("solve_dirichlet: the central-regularized gradient needs the explicit method");

  std::string note;
  if (!done && method == SolveMethod::Policy) {
    res.policy = (warm && warm->frame.size() == n) ? *warm : disc.policy(u);
    res.method = SolveMethod::Policy;
    if (auto o = howard(disc, opt, u, res.policy)) {
      out = *o;
      done = true;
    } else {
      note = "policy iteration not certified; ";
    }
  }
  if (!done) {
    res.method = SolveMethod::Explicit;
    out = explicit_iteration(disc, opt, max_iter, u);
    out.detail = note + out.detail;
  }

  res.status = out.status;
  res.iterations = out.iterations;
  res.detail = out.detail;
  disc.residual(u, F);
  res.residual = sup_abs(F);
  res.sup_norm = res.u.sup_norm();
  if (std::isfinite(res.sup_norm)) {
    res.lipschitz = lipschitz_estimate(res.u).value;
    res.boundary_ratio = boundary_growth(res.u);
  }
  return res;
}

LipschitzEstimate lipschitz_estimate(const GridField& u, int shells) {
  if (!u.grid) throw InvalidInput("lipschitz_estimate: grid function has no grid");
  if (shells < 0) throw InvalidInput("lipschitz_estimate: shells must be >= 0");
  const Grid& g = *u.grid;
  const int n = g.dim();
  const double h = g.h();
  LipschitzEstimate est;
  est.shells.assign(shells, 0.0);

  // Offsets in the index box of radius 2, one of each +/- pair.
  std::vector<std::vector<int>> offs;
  std::vector<int> v(n, -2);
  while (true) {
    int first = 0;
    for (int c : v)
      if (c != 0) {
        first = c;
        break;
      }
    if (first > 0) offs.push_back(v);
    int i = n - 1;
    while (i >= 0 && v[i] == 2) v[i--] = -2;
    if (i < 0) break;
    ++v[i];
  }

  const auto& ext = g.extent();
  for (std::size_t a = 0; a < g.active_count(); ++a) {
    const int node = g.active_node(a);
    const auto idx = g.multi_index(node);
    double m = 0.0;
    for (const auto& o : offs) {
      long q = 0;
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        const int j = idx[i] + o[i];
        if (j < 0 || j >= ext[i]) ok = false;
        q = q * ext[i] + j;
      }
      if (!ok) continue;
      const int b = g.active_index(static_cast<std::size_t>(q));
      if (b < 0) continue;
      double len = 0.0;
      for (int c : o) len += c * c;
      m = std::max(m, std::abs(u.values[a] - u.values[b]) / (h * std::sqrt(len)));
    }
    for (int d = 0; d < g.direction_count(); ++d) {
      const Arm& arm = g.arm(a, d);
      if (arm.neighbor >= 0) continue;
      double len = 0.0;
      for (int c : g.lines()[d / 2]) len += c * c;
      m = std::max(m, std::abs(u.values[a]) / (arm.theta * h * std::sqrt(len)));
    }
    est.value = std::max(est.value, m);
    const int s = static_cast<int>(g.active_distance(a) / h);
    if (s < shells) est.shells[s] = std::max(est.shells[s], m);
  }
  return est;
}

double boundary_growth(const GridField& u) {
  if (!u.grid) throw InvalidInput("boundary_growth: grid function has no grid");
  const Grid& g = *u.grid;
  double m = 0.0;
  for (std::size_t a = 0; a < g.active_count(); ++a)
    if (g.active_class(a) == NodeClass::Cut) m = std::max(m, std::abs(u.values[a]) / g.active_distance(a));
  return m;
}

}  // namespace trunclap
