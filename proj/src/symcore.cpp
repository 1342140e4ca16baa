#include "trunclap/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trunclap/constants.hpp"
#include "trunclap/errors.hpp"

namespace trunclap {

SymMatrix::SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {
  if (n < 1) throw InvalidInput("SymMatrix: dimension must be >= 1");
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_rows(std::span<const double> rowmajor, int n) {
  if (rowmajor.size() != static_cast<std::size_t>(n) * n)
    throw InvalidInput("SymMatrix::from_rows: expected n*n entries");
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, rowmajor[i * n + j]);
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v) {
  SymMatrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i; j < m.dim(); ++j) m.set(i, j, v[i] * v[j]);
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool SymMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

double SymMatrix::quad(std::span<const double> xi) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    s += (*this)(i, i) * xi[i] * xi[i];
    for (int j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * xi[i] * xi[j];
  }
  return s;
}

std::vector<double> SymMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
  return y;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n_ != n_) throw InvalidInput("SymMatrix: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n_ != n_) throw InvalidInput("SymMatrix: dimension mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double t) {
  for (double& v : a_) v *= t;
  return *this;
}

SpectralDecomposition spectral_decomposition(const SymMatrix& x) {
  if (!x.all_finite()) throw InvalidInput("eigvals_sym: non-finite matrix entry");
  const int n = x.dim();
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  auto A = [&](int i, int j) -> double& { return a[i * n + j]; };
  auto V = [&](int i, int j) -> double& { return v[i * n + j]; };
  for (int i = 0; i < n; ++i) {
    V(i, i) = 1.0;
    for (int j = 0; j < n; ++j) A(i, j) = x(i, j);
  }

  double norm2 = 0.0;
  for (double e : a) norm2 += e * e;

  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off <= tol::kJacobiOffDiag * tol::kJacobiOffDiag * norm2 || off == 0.0) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing A(p,q): tan(2 phi) = 2 apq / (aqq - app)
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          const double arp = A(r, p), arq = A(r, q);
          A(r, p) = c * arp - s * arq;
          A(r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = A(p, r), aqr = A(q, r);
          A(p, r) = c * apr - s * aqr;
          A(q, r) = s * apr + c * aqr;
        }
        A(p, q) = A(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          const double vrp = V(r, p), vrq = V(r, q);
          V(r, p) = c * vrp - s * vrq;
          V(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) < A(j, j); });

  SpectralDecomposition out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (int idx : order) {
    out.values.push_back(A(idx, idx));
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) col[r] = V(r, idx);
    out.vectors.push_back(std::move(col));
  }
  for (int i = 0; i < n; ++i) {
    const auto xv = x.apply(out.vectors[i]);
    for (int r = 0; r < n; ++r)
      out.residual = std::max(out.residual, std::abs(xv[r] - out.values[i] * out.vectors[i][r]));
  }
  return out;
}

std::vector<double> eigvals_sym(const SymMatrix& x) { return spectral_decomposition(x).values; }

namespace {
void check_k(const SymMatrix& x, int k) {
  if (k < 1 || k > x.dim())
    throw InvalidInput("truncated Laplacian: k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(x.dim()) + "]");
}
}  // namespace

double pk_minus(const SymMatrix& x, int k) {
  check_k(x, k);
  const auto ev = eigvals_sym(x);
  return std::accumulate(ev.begin(), ev.begin() + k, 0.0);
}

double pk_plus(const SymMatrix& x, int k) {
  check_k(x, k);
  const auto ev = eigvals_sym(x);
  return std::accumulate(ev.end() - k, ev.end(), 0.0);
}

double pk(const SymMatrix& x, int k, OperatorSign sign) {
  return sign == OperatorSign::Minus ? pk_minus(x, k) : pk_plus(x, k);
}

Frame::Frame(int n, std::vector<std::vector<double>> vectors) : n_(n), vectors_(std::move(vectors)) {
  if (vectors_.empty() || static_cast<int>(vectors_.size()) > n)
    throw InvalidInput("Frame: need 1..n vectors");
  for (const auto& v : vectors_)
    if (static_cast<int>(v.size()) != n) throw InvalidInput("Frame: vector of wrong dimension");
  if (orthonormality_defect() > tol::kOrthonormal) throw InvalidInput("Frame: vectors are not orthonormal");
}

double Frame::orthonormality_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors_.size(); ++i)
    for (std::size_t j = i; j < vectors_.size(); ++j) {
      double d = 0.0;
      for (int r = 0; r < n_; ++r) d += vectors_[i][r] * vectors_[j][r];
      worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double Frame::trace_against(const SymMatrix& x) const {
  double s = 0.0;
  for (const auto& v : vectors_) s += x.quad(v);
  return s;
}

Frame Frame::axes(int n, int k) {
  std::vector<std::vector<double>> vs;
  for (int i = 0; i < k; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    vs.push_back(std::move(e));
  }
  return Frame(n, std::move(vs));
}

Frame Frame::lowest_eigenvectors(const SymMatrix& x, int k) {
  check_k(x, k);
  auto sd = spectral_decomposition(x);
  sd.vectors.resize(k);
  return Frame(x.dim(), std::move(sd.vectors));
}

double pk_minus_frames(const SymMatrix& x, int k, std::span<const Frame> frames) {
  check_k(x, k);
  if (frames.empty()) throw InvalidInput("pk_minus_frames: empty frame list");
  double best = 0.0;
  bool first = true;
  for (const auto& f : frames) {
    if (f.size() != k || f.dim() != x.dim()) throw InvalidInput("pk_minus_frames: frame shape mismatch");
    const double s = f.trace_against(x);
    if (first || s < best) best = s;
    first = false;
  }
  return best;
}

bool InequalityReport::all_pass() const {
  return lower_minus.pass && upper_minus.pass && lower_plus.pass && upper_plus.pass && duality.pass &&
         (!loewner_applicable || loewner.pass) && homogeneity.pass;
}

namespace {
void record(InequalityCheck& c, double margin, double scale) {
  c.slack = std::min(c.slack, margin);
  if (margin < -tol::kIdentity * scale) c.pass = false;
}
}  // namespace

InequalityReport check_inequalities(const SymMatrix& x, const SymMatrix& y, int k) {
  if (x.dim() != y.dim()) throw InvalidInput("check_inequalities: dimension mismatch");
  check_k(x, k);
  InequalityReport r;
  r.lower_minus.slack = r.upper_minus.slack = r.lower_plus.slack = r.upper_plus.slack = 0.0;
  const double scale = 1.0 + x.max_abs() + y.max_abs();

  const double pmY = pk_minus(y, k), ppY = pk_plus(y, k);
  const SymMatrix xy = x + y;
  const double dm = pk_minus(xy, k) - pk_minus(x, k);
  const double dp = pk_plus(xy, k) - pk_plus(x, k);
  r.lower_minus.slack = dm - pmY;
  r.upper_minus.slack = ppY - dm;
  r.lower_plus.slack = dp - pmY;
  r.upper_plus.slack = ppY - dp;
  for (auto* c : {&r.lower_minus, &r.upper_minus, &r.lower_plus, &r.upper_plus})
    c->pass = c->slack >= -tol::kIdentity * scale;

  r.duality.slack = -std::abs(pk_plus(x, k) + pk_minus(-x, k));
  r.duality.pass = -r.duality.slack <= tol::kIdentity * scale;

  const auto gap = eigvals_sym(y - x);
  r.loewner_applicable = gap.front() >= -tol::kLoewner;
  if (r.loewner_applicable) {
    r.loewner.slack = std::min(pk_minus(y, k) - pk_minus(x, k), pk_plus(y, k) - pk_plus(x, k));
    r.loewner.pass = r.loewner.slack >= -tol::kIdentity * scale;
  }

  for (double t : {0.5, 2.0, 10.0}) {
    const SymMatrix tx = t * x;
    record(r.homogeneity, -std::abs(pk_minus(tx, k) - t * pk_minus(x, k)), t * scale);
    record(r.homogeneity, -std::abs(pk_plus(tx, k) - t * pk_plus(x, k)), t * scale);
  }
  return r;
}

}  // namespace trunclap
