#include "trunclap/scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "trunclap/errors.hpp"
#include "trunclap/parallel.hpp"

namespace trunclap {

namespace {

std::atomic<int> g_threads{1};

bool field_ok(const ScalarField& f, int dim) {
  if (f.kind == ScalarField::Kind::Affine && static_cast<int>(f.gradient.size()) != dim) return false;
  if (f.kind == ScalarField::Kind::Trig && (f.axis < 0 || f.axis >= dim)) return false;
  return std::isfinite(f.c0) && std::isfinite(f.amplitude) && std::isfinite(f.frequency) && std::isfinite(f.phase);
}

}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

const char* to_string(GradientScheme g) {
  return g == GradientScheme::Upwind ? "upwind" : "central_regularized";
}

void ProblemSpec::validate() const {
  const int n = domain.dim();
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("problem: h must be positive");
  if (scheme.width < 1) throw InvalidInput("problem: stencil width must be >= 1");
  if (scheme.k < 1 || scheme.k > n) throw InvalidInput("problem: k must lie in [1, dimension]");
  if (!std::isfinite(mu)) throw InvalidInput("problem: mu must be finite");
  if (!(H.b_bound >= 0.0) || !std::isfinite(H.b_bound)) throw InvalidInput("problem: b_bound must be >= 0");
  if (!field_ok(f, n)) throw InvalidInput("problem: forcing does not match the dimension");
  if (!field_ok(H.b, n)) throw InvalidInput("problem: coefficient b does not match the dimension");
  if (H.kind == HamiltonianKind::Drift) {
    if (static_cast<int>(H.drift.size()) != n) throw InvalidInput("problem: drift needs one component per axis");
    for (const auto& c : H.drift)
      if (!field_ok(c, n)) throw InvalidInput("problem: drift component does not match the dimension");
  }
}

StencilSet StencilSet::make(int dim, int width, int k) {
  if (k < 1 || k > dim) throw InvalidInput("StencilSet: k must lie in [1, dimension]");
  StencilSet st;
  st.dim = dim;
  st.k = k;
  st.lines = lattice_lines(dim, width);
  for (const auto& e : st.lines) {
    double s = 0.0;
    for (int c : e) s += c * c;
    const double len = std::sqrt(s);
    Point u(dim);
    for (int i = 0; i < dim; ++i) u[i] = e[i] / len;
    st.units.push_back(std::move(u));
    st.lengths.push_back(len);
  }
  if (k == dim) {
    std::vector<int> axes(dim);
    for (int i = 0; i < dim; ++i) axes[i] = i;
    st.frames.push_back(std::move(axes));
    return st;
  }
  const int m = static_cast<int>(st.lines.size());
  auto orth = [&](int a, int b) {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += st.lines[a][i] * st.lines[b][i];
    return s == 0;
  };
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      st.frames.push_back(cur);
      return;
    }
    for (int l = start; l < m; ++l) {
      if (!std::all_of(cur.begin(), cur.end(), [&](int c) { return orth(c, l); })) continue;
      cur.push_back(l);
      self(self, l + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return st;
}

double cut_second_difference(double u_minus, double u0, double u_plus, double theta_minus, double theta_plus,
                             double L) {
  const double s = theta_plus + theta_minus;
  return 2.0 / (L * L) *
         (u_plus / (theta_plus * s) - u0 / (theta_plus * theta_minus) + u_minus / (theta_minus * s));
}

Discretization::Discretization(const ProblemSpec& prob)
    : Discretization(std::make_shared<const Grid>(build_grid(prob.domain, prob.h, prob.scheme.width)), prob) {}

Discretization::Discretization(std::shared_ptr<const Grid> grid, const ProblemSpec& prob)
    : grid_(std::move(grid)), cfg_(prob.scheme), H_(prob.H), mu_(prob.mu) {
  prob.validate();
  const Grid& g = *grid_;
  const int n = g.dim();
  if (n != prob.domain.dim()) throw ConfigurationError("Discretization: grid and problem dimensions differ");
  if (g.width() != cfg_.width) throw ConfigurationError("Discretization: grid was built for another stencil width");
  st_ = StencilSet::make(n, g.width(), cfg_.k);

  const std::size_t na = g.active_count();
  const int nl = static_cast<int>(st_.lines.size());
  const int nd = g.direction_count();
  const double h = g.h();

  f_.resize(na);
  coef_.assign(na, 0.0);
  drift_.assign(H_.kind == HamiltonianKind::Drift ? na * n : 0, 0.0);
  lc_.resize(na * nl);
  inv_arm_.resize(na * nd);
  diag_bound_.resize(na);

  double max_coef = 0.0, max_drift = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const Point x = g.active_position(a);
    f_[a] = prob.f(x);
    coef_[a] = norm_coefficient(H_, x);
    max_coef = std::max(max_coef, std::abs(coef_[a]));
    if (H_.kind == HamiltonianKind::Drift) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        drift_[a * n + i] = H_.drift[i](x);
        s += drift_[a * n + i] * drift_[a * n + i];
      }
      max_drift = std::max(max_drift, std::sqrt(s));
    }
    for (int d = 0; d < nd; ++d) inv_arm_[a * nd + d] = 1.0 / (g.arm(a, d).theta * h * st_.lengths[d / 2]);
    for (int l = 0; l < nl; ++l) {
      const Arm& ap = g.arm(a, 2 * l);
      const Arm& am = g.arm(a, 2 * l + 1);
      const double L = h * st_.lengths[l];
      const double s = ap.theta + am.theta;
      lc_[a * nl + l] = LineCoef{ap.neighbor, am.neighbor, 2.0 / (L * L * ap.theta * s),
                                 -2.0 / (L * L * ap.theta * am.theta), 2.0 / (L * L * am.theta * s)};
    }
  }
  lf_alpha_ = 2.0 * std::max({H_.b_bound, max_coef, max_drift});

  bool all_nonpos = true, all_nonneg = true;
  for (double c : coef_) {
    all_nonpos = all_nonpos && c <= 0.0;
    all_nonneg = all_nonneg && c >= 0.0;
  }
  concave_ = linearizable() && cfg_.sign == OperatorSign::Minus && all_nonpos;
  convex_ = linearizable() && cfg_.sign == OperatorSign::Plus && all_nonneg;

  for (std::size_t a = 0; a < na; ++a) {
    double worst = 0.0;
    for (const auto& fr : st_.frames) {
      double s = 0.0;
      for (int l : fr) s -= lc_[a * nl + l].c0;
      worst = std::max(worst, s);
    }
    double grad = 0.0;
    if (cfg_.gradient == GradientScheme::CentralRegularized) {
      if (H_.kind != HamiltonianKind::Zero)
        for (int i = 0; i < n; ++i) grad += 0.5 * lf_alpha_ * (inv_arm_[a * nd + 2 * i] + inv_arm_[a * nd + 2 * i + 1]);
    } else if (H_.kind == HamiltonianKind::Drift) {
      for (int i = 0; i < n; ++i) {
        const double b = drift_[a * n + i];
        grad += std::abs(b) * inv_arm_[a * nd + (b > 0.0 ? 2 * i : 2 * i + 1)];
      }
    } else if (coef_[a] != 0.0) {
      double m = 0.0;
      for (int d = 0; d < nd; ++d) m = std::max(m, inv_arm_[a * nd + d]);
      grad = std::abs(coef_[a]) * m;
    }
    diag_bound_[a] = worst + grad;
  }
}

void Discretization::set_forcing(const ScalarField& f) {
  for (std::size_t a = 0; a < size(); ++a) f_[a] = f(grid_->active_position(a));
}

void Discretization::set_forcing_values(std::vector<double> f) {
  if (f.size() != size()) throw InvalidInput("set_forcing_values: wrong length");
  f_ = std::move(f);
}

double Discretization::line_value(std::span<const double> u, std::size_t a, int line) const {
  const LineCoef& c = lc_[a * st_.lines.size() + line];
  double v = c.c0 * u[a];
  if (c.plus >= 0) v += c.cp * u[c.plus];
  if (c.minus >= 0) v += c.cm * u[c.minus];
  return v;
}

double Discretization::second_diff(std::span<const double> u, std::size_t a, int line) const {
  if (line < 0 || line >= static_cast<int>(st_.lines.size())) throw InvalidInput("second_diff: no such line");
  return line_value(u, a, line);
}

double Discretization::frame_value(std::span<const double> u, std::size_t a, int frame) const {
  double s = 0.0;
  for (int l : st_.frames[frame]) s += line_value(u, a, l);
  return s;
}

double Discretization::apply_pk(std::span<const double> u, std::size_t a, int* frame) const {
  const int nl = static_cast<int>(st_.lines.size());
  double lv[64];
  std::vector<double> big;
  double* vals = lv;
  if (nl > 64) {
    big.resize(nl);
    vals = big.data();
  }
  for (int l = 0; l < nl; ++l) vals[l] = line_value(u, a, l);
  const bool minus = cfg_.sign == OperatorSign::Minus;
  double best = minus ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (std::size_t f = 0; f < st_.frames.size(); ++f) {
    double s = 0.0;
    for (int l : st_.frames[f]) s += vals[l];
    if (minus ? s < best : s > best) best = s, arg = static_cast<int>(f);
  }
  if (frame) *frame = arg;
  return best;
}

double Discretization::grad_diff(std::span<const double> u, std::size_t a, int d) const {
  const int nb = grid_->arm(a, d).neighbor;
  return ((nb >= 0 ? u[nb] : 0.0) - u[a]) * inv_arm_[a * grid_->direction_count() + d];
}

double Discretization::grad_value(std::span<const double> u, std::size_t a, int d) const {
  if (d < 0) return 0.0;
  return std::abs(coef_[a]) * grad_diff(u, a, d);
}

double Discretization::apply_h(std::span<const double> u, std::size_t a, int* grad) const {
  if (grad) *grad = -1;
  if (H_.kind == HamiltonianKind::Zero) return 0.0;
  const int n = grid_->dim();

  if (cfg_.gradient == GradientScheme::CentralRegularized) {
    Point p(n);
    double reg = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dp = grad_diff(u, a, 2 * i), dm = grad_diff(u, a, 2 * i + 1);
      const double tp = grid_->arm(a, 2 * i).theta, tm = grid_->arm(a, 2 * i + 1).theta;
      // central difference over the (possibly shortened) arms
      p[i] = (dp * tp - dm * tm) / (tp + tm);
      reg += dp + dm;
    }
    double hv = 0.0;
    if (H_.kind == HamiltonianKind::Drift) {
      for (int i = 0; i < n; ++i) hv += drift_[a * n + i] * p[i];
    } else {
      hv = coef_[a] * norm(p);
    }
    return hv + 0.5 * lf_alpha_ * reg;
  }

  if (H_.kind == HamiltonianKind::Drift) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double b = drift_[a * n + i];
      if (b > 0.0)
        s += b * grad_diff(u, a, 2 * i);
      else if (b < 0.0)
        s -= b * grad_diff(u, a, 2 * i + 1);
    }
    return s;
  }

  const double c = coef_[a];
  if (c == 0.0) return 0.0;
  const int nd = grid_->direction_count();
  double best = 0.0;
  int arg = -1;
  for (int d = 0; d < nd; ++d) {
    const double v = grad_diff(u, a, d);
    if (c > 0.0 ? v > best : v < best) best = v, arg = d;
  }
  if (grad) *grad = arg;
  return std::abs(c) * best;
}

double Discretization::apply_full(std::span<const double> u, std::size_t a) const {
  return apply_pk(u, a) + apply_h(u, a) + mu_ * u[a] - f_[a];
}

void Discretization::residual(std::span<const double> u, std::span<double> out) const {
  parallel_for(size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t a = b; a < e; ++a) out[a] = apply_full(u, a);
  });
}

Policy Discretization::policy(std::span<const double> u) const {
  Policy p;
  p.frame.resize(size());
  p.grad.resize(size());
  for (std::size_t a = 0; a < size(); ++a) {
    apply_pk(u, a, &p.frame[a]);
    apply_h(u, a, &p.grad[a]);
  }
  return p;
}

std::size_t Discretization::improve_policy(std::span<const double> u, Policy& p) const {
  std::size_t changed = 0;
  const bool minus = cfg_.sign == OperatorSign::Minus;
  double usup = 0.0;
  for (double v : u) usup = std::max(usup, std::abs(v));
  for (std::size_t a = 0; a < size(); ++a) {
    int f = 0, g = -1;
    const double best = apply_pk(u, a, &f);
    const double cur = frame_value(u, a, p.frame[a]);
    // ties up to the cancellation error of the stencil sums
    const double eps = 32.0 * std::numeric_limits<double>::epsilon() * (diag_bound_[a] + 1.0) * usup;
    if (f != p.frame[a] && (minus ? best < cur - eps : best > cur + eps)) {
      p.frame[a] = f;
      ++changed;
    }
    if (H_.kind == HamiltonianKind::Norm || H_.kind == HamiltonianKind::NegNorm) {
      const double hb = apply_h(u, a, &g);
      const double hc = grad_value(u, a, p.grad[a]);
      const double he = eps;
      if (g != p.grad[a] && (coef_[a] > 0.0 ? hb > hc + he : hb < hc - he)) {
        p.grad[a] = g;
        ++changed;
      }
    }
  }
  return changed;
}

double Discretization::linear_row(std::size_t a, int frame, int grad, std::vector<std::pair<int, double>>& row) const {
  const int nl = static_cast<int>(st_.lines.size());
  const int nd = grid_->direction_count();
  const int n = grid_->dim();
  double diag = 0.0;
  for (int l : st_.frames[frame]) {
    const LineCoef& c = lc_[a * nl + l];
    diag += c.c0;
    if (c.plus >= 0) row.emplace_back(c.plus, c.cp);
    if (c.minus >= 0) row.emplace_back(c.minus, c.cm);
  }
  auto arm_term = [&](int d, double w) {
    const int nb = grid_->arm(a, d).neighbor;
    const double c = w * inv_arm_[a * nd + d];
    diag -= c;
    if (nb >= 0) row.emplace_back(nb, c);
  };
  if (H_.kind == HamiltonianKind::Drift) {
    for (int i = 0; i < n; ++i) {
      const double b = drift_[a * n + i];
      if (b > 0.0) arm_term(2 * i, b);
      else if (b < 0.0) arm_term(2 * i + 1, -b);
    }
  } else if (grad >= 0) {
    arm_term(grad, std::abs(coef_[a]));
  }
  return diag;
}

double second_diff(const Discretization& disc, const GridField& u, std::size_t a, int line) {
  return disc.second_diff(u.values, a, line);
}

double apply_pk(const Discretization& disc, const GridField& u, std::size_t a) {
  return disc.apply_pk(u.values, a);
}

double apply_full(const Discretization& disc, const GridField& u, std::size_t a) {
  return disc.apply_full(u.values, a);
}

}  // namespace trunclap
