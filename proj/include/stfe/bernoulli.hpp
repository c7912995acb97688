#pragma once

#include <cmath>

namespace stfe {

// Bernoulli function B(s) = s/(e^s - 1), extended by B(0) = 1.  Evaluation is
// split into branches so that no input overflows and the value stays positive:
// the series near 0 avoids the 0/0 cancellation, s/expm1(s) is accurate up to
// s = 500, beyond that s*e^{-s} underflows gracefully, and negative arguments
// use the reflection B(s) = -s + B(-s).
inline double bernoulli(double s) {
  if (s < -1e-8) {
    const double t = -s;
    const double pos = t <= 500.0 ? t / std::expm1(t) : t * std::exp(-t);
    return t + pos;
  }
  if (s < 1e-8) return 1.0 - 0.5 * s + s * s / 12.0;
  if (s <= 500.0) return s / std::expm1(s);
  return s * std::exp(-s);
}

}  // namespace stfe
