#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rateloss {

/// von Neumann entropy (in bits) of a thermal state with mean photon number
/// x, equal to the Shannon entropy of a geometric distribution with mean x:
///
///   g(x) = (x+1) log2(x+1) - x log2(x),   g(0) = 0 by continuity.
///
/// Strictly increasing and concave on [0, inf).
inline double g_entropy(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::domain_error("g_entropy: mean photon number must be finite and >= 0, got " +
                            std::to_string(x));
  }
  if (x < 1e-300) return 0.0;  // continuity limit; avoids log underflow
  return (x + 1.0) * std::log1p(x) / std::numbers::ln2 - x * std::log2(x);
}

/// Binary entropy h2(p) = -p log2(p) - (1-p) log2(1-p) in bits, with the
/// endpoint values fixed to 0 by continuity.
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binary_entropy: probability must lie in [0,1], got " +
                            std::to_string(p));
  }
  if (p < 1e-300 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace rateloss
