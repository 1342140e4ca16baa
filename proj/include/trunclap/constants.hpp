#pragma once

namespace trunclap::tol {

// ~100x double roundoff for the matrix sizes used here (n <= 8).
inline constexpr double kIdentity = 1e-10;
inline constexpr double kOrthonormal = 1e-12;
inline constexpr double kLoewner = 1e-12;
inline constexpr double kReconstruction = 1e-12;

// Jacobi sweeps stop when the off-diagonal mass falls below this fraction of the norm.
inline constexpr double kJacobiOffDiag = 1e-15;
inline constexpr int kJacobiMaxSweeps = 100;

// A grid node counts as inside when its distance to the boundary exceeds kInsideFraction * h.
inline constexpr double kInsideFraction = 1e-9;
// Boundary crossing fractions are resolved to kCrossingFraction * h.
inline constexpr double kCrossingFraction = 1e-12;

inline constexpr double kHulaHoop = 1e-9;
inline constexpr double kSingularMargin = 1e-8;
inline constexpr double kCertify = 1e-8;

}  // namespace trunclap::tol
