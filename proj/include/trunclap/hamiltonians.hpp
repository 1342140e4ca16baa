#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trunclap/field.hpp"

namespace trunclap {

class DomainSpec;

enum class HamiltonianKind { Zero, Norm, NegNorm, Drift };

/// First-order term H(x, xi):
///   zero      0
///   norm      b(x) |xi|
///   neg_norm  -b(x) |xi|
///   drift     <b(x), xi>
/// b_bound is the declared constant b with |H(x, xi)| <= b |xi|.
struct HamiltonianSpec {
  HamiltonianKind kind = HamiltonianKind::Zero;
  ScalarField b = ScalarField::constant(0.0);
  std::vector<ScalarField> drift;
  double b_bound = 0.0;

  static HamiltonianSpec zero() { return {}; }
  static HamiltonianSpec norm(ScalarField b, double bound) { return {HamiltonianKind::Norm, std::move(b), {}, bound}; }
  static HamiltonianSpec neg_norm(ScalarField b, double bound) {
    return {HamiltonianKind::NegNorm, std::move(b), {}, bound};
  }
  static HamiltonianSpec drift_field(std::vector<ScalarField> b, double bound) {
    return {HamiltonianKind::Drift, ScalarField::constant(0.0), std::move(b), bound};
  }
};

const char* to_string(HamiltonianKind k);

double eval_h(const HamiltonianSpec& spec, std::span<const double> x, std::span<const double> xi);

/// Signed coefficient s(x) with H(x, xi) = s(x) |xi| for the norm kinds; 0 otherwise.
double norm_coefficient(const HamiltonianSpec& spec, std::span<const double> x);

struct ConditionResult {
  bool pass = true;
  double slack = 0.0;  // smallest margin seen
  Point worst_x;
  Point worst_xi;
};

struct StructureReport {
  ConditionResult sc1;  // |H(x,xi)| <= b |xi|
  ConditionResult sc2;  // H(x, t xi) = t H(x, xi), t > 0
  ConditionResult sc3;  // |H(x,xi) - H(y,xi)| <= C |x-y| |xi|, C finite
  double lipschitz_x = 0.0;  // sampled C
  int samples = 0;
  bool all_pass() const { return sc1.pass && sc2.pass && sc3.pass; }
};

StructureReport validate_structure(const HamiltonianSpec& spec, const DomainSpec& domain, int samples,
                                   std::uint64_t seed = 20181u);

}  // namespace trunclap
