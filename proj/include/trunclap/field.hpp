#pragma once

#include <span>
#include <string>
#include <vector>

namespace trunclap {

using Point = std::vector<double>;

/// Scalar coefficient b(x) or forcing f(x) drawn from a small closed catalog.
///   constant: c0
///   affine:   c0 + <g, x>
///   trig:     c0 + amplitude * sin(frequency * x[axis] + phase)
struct ScalarField {
  enum class Kind { Constant, Affine, Trig };

  Kind kind = Kind::Constant;
  double c0 = 0.0;
  std::vector<double> gradient;
  double amplitude = 0.0;
  int axis = 0;
  double frequency = 1.0;
  double phase = 0.0;

  static ScalarField constant(double v) { return {Kind::Constant, v, {}, 0.0, 0, 1.0, 0.0}; }
  static ScalarField affine(double c0, std::vector<double> g) { return {Kind::Affine, c0, std::move(g), 0.0, 0, 1.0, 0.0}; }
  static ScalarField trig(double c0, double amplitude, int axis, double frequency, double phase) {
    return {Kind::Trig, c0, {}, amplitude, axis, frequency, phase};
  }

  double operator()(std::span<const double> x) const;
  bool is_constant() const { return kind == Kind::Constant; }
  std::string describe() const;
};

double norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double distance_between(std::span<const double> a, std::span<const double> b);

}  // namespace trunclap
