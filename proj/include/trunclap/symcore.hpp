#pragma once

#include <span>
#include <utility>
#include <vector>

namespace trunclap {

enum class OperatorSign { Minus, Plus };

/// Dense symmetric n x n matrix. Only the upper triangle is stored, row by row.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  /// Reads the upper triangle of a row-major n x n array; the lower triangle is ignored.
  static SymMatrix from_rows(std::span<const double> rowmajor, int n);
  /// Outer product v v^T.
  static SymMatrix outer(std::span<const double> v);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[index(i, j)]; }
  void set(int i, int j, double v) { a_[index(i, j)] = v; }
  void add(int i, int j, double v) { a_[index(i, j)] += v; }

  std::span<const double> packed() const { return a_; }

  double trace() const;
  double max_abs() const;
  bool all_finite() const;
  /// <X xi, xi>
  double quad(std::span<const double> xi) const;
  std::vector<double> apply(std::span<const double> x) const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double t);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double t, SymMatrix a) { return a *= t; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

 private:
  int index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }

  int n_ = 0;
  std::vector<double> a_;
};

struct SpectralDecomposition {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
  double residual = 0.0;                     // max |X v - lambda v|
};

/// Cyclic Jacobi eigensolver. Throws InvalidInput on non-finite entries.
SpectralDecomposition spectral_decomposition(const SymMatrix& x);

/// Eigenvalues in ascending order.
std::vector<double> eigvals_sym(const SymMatrix& x);

/// Sum of the k smallest eigenvalues.
double pk_minus(const SymMatrix& x, int k);
/// Sum of the k largest eigenvalues.
double pk_plus(const SymMatrix& x, int k);
double pk(const SymMatrix& x, int k, OperatorSign sign);

/// k orthonormal vectors in R^n.
class Frame {
 public:
  /// Throws InvalidInput unless the vectors are orthonormal to tol::kOrthonormal.
  Frame(int n, std::vector<std::vector<double>> vectors);

  int dim() const { return n_; }
  int size() const { return static_cast<int>(vectors_.size()); }
  const std::vector<double>& operator[](int i) const { return vectors_[i]; }

  /// Largest |<xi_i, xi_j> - delta_ij|.
  double orthonormality_defect() const;
  /// sum_i <X xi_i, xi_i>
  double trace_against(const SymMatrix& x) const;

  static Frame axes(int n, int k);
  /// The eigenvectors belonging to the k smallest eigenvalues.
  static Frame lowest_eigenvectors(const SymMatrix& x, int k);

 private:
  int n_;
  std::vector<std::vector<double>> vectors_;
};

/// Minimum over the supplied frames of sum_i <X xi_i, xi_i>. Always >= pk_minus(x, k).
double pk_minus_frames(const SymMatrix& x, int k, std::span<const Frame> frames);

struct InequalityCheck {
  bool pass = true;
  double slack = 0.0;  // worst (smallest) margin; negative means violated
};

struct InequalityReport {
  // P^-_k(Y) <= P^s_k(X+Y) - P^s_k(X) <= P^+_k(Y), for s = minus and plus.
  InequalityCheck lower_minus, upper_minus, lower_plus, upper_plus;
  // P^+_k(X) = -P^-_k(-X)
  InequalityCheck duality;
  // X <= Y  =>  P^s_k(X) <= P^s_k(Y). Only meaningful when loewner_applicable.
  bool loewner_applicable = false;
  InequalityCheck loewner;
  // P^s_k(tX) = t P^s_k(X), t in {0.5, 2, 10}
  InequalityCheck homogeneity;

  bool all_pass() const;
};

InequalityReport check_inequalities(const SymMatrix& x, const SymMatrix& y, int k);

}  // namespace trunclap
