#pragma once

#include "trunclap/field.hpp"
#include "trunclap/geometry.hpp"
#include "trunclap/hamiltonians.hpp"
#include "trunclap/symcore.hpp"

namespace trunclap {

enum class GradientScheme { Upwind, CentralRegularized };

const char* to_string(GradientScheme g);

struct SchemeConfig {
  int width = 2;
  OperatorSign sign = OperatorSign::Minus;
  int k = 1;
  GradientScheme gradient = GradientScheme::Upwind;
};

/// P^s_k(D^2u) + H(x, Du) + mu u = f in the domain, u = 0 on the boundary, on a grid of spacing h.
struct ProblemSpec {
  DomainSpec domain;
  SchemeConfig scheme;
  HamiltonianSpec H;
  double mu = 0.0;
  ScalarField f = ScalarField::constant(0.0);
  double h = 1.0 / 32.0;

  /// Throws InvalidInput/ConfigurationError for inconsistent fields.
  void validate() const;
};

}  // namespace trunclap
