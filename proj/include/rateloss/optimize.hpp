#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rateloss {

struct OptimizationResult {
  double argopt = 0.0;        // location of the extremum, within [lo, hi]
  double value = 0.0;         // objective value at argopt
  std::size_t evaluations = 0;
};

namespace detail {

inline constexpr double kInvGolden = 0.61803398874989484820;

}  // namespace detail

/// Derivative-free scalar minimization on [lo, hi]: a uniform pre-scan
/// (guarding against objectives that are flat or not unimodal near the
/// boundaries) brackets the minimum, golden-section refines it until the
/// bracket is narrower than tol. For unimodal f the returned argopt is
/// within tol of the true minimizer. Deterministic for fixed inputs.
template <typename F>
OptimizationResult minimize_scalar(F&& f, double lo, double hi, double tol = 1e-9,
                                   int prescan_points = 64) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw std::invalid_argument("minimize_scalar: requires finite lo < hi");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("minimize_scalar: tol must be positive and finite");
  }
  if (prescan_points < 4) {
    throw std::invalid_argument("minimize_scalar: prescan_points must be >= 4");
  }

  std::size_t evals = 0;
  auto eval = [&](double x) {
    const double y = f(x);
    ++evals;
    if (!std::isfinite(y)) {
      throw std::domain_error("scalar optimizer: objective is not finite at x = " +
                              std::to_string(x));
    }
    return y;
  };

  const int n = prescan_points;
  auto node = [&](int i) { return i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1); };

  double best_x = lo;
  double best_y = eval(lo);
  int best_i = 0;
  for (int i = 1; i < n; ++i) {
    const double x = node(i);
    const double y = eval(x);
    if (y < best_y) {
      best_y = y;
      best_x = x;
      best_i = i;
    }
  }

  double a = node(std::max(0, best_i - 1));
  double b = node(std::min(n - 1, best_i + 1));

  double x1 = b - detail::kInvGolden * (b - a);
  double x2 = a + detail::kInvGolden * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  auto consider = [&](double x, double y) {
    if (y < best_y) {
      best_y = y;
      best_x = x;
    }
  };
  consider(x1, f1);
  consider(x2, f2);

  for (int iter = 0; b - a > tol && iter < 500; ++iter) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - detail::kInvGolden * (b - a);
      f1 = eval(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + detail::kInvGolden * (b - a);
      f2 = eval(x2);
      consider(x2, f2);
    }
  }

  return {best_x, best_y, evals};
}

/// Mirror of minimize_scalar with the objective sign flipped; the returned
/// value is the (unnegated) maximum of f.
template <typename F>
OptimizationResult maximize_scalar(F&& f, double lo, double hi, double tol = 1e-9,
                                   int prescan_points = 64) {
  OptimizationResult res =
      minimize_scalar([&](double x) { return -f(x); }, lo, hi, tol, prescan_points);
  res.value = -res.value;
  return res;
}

}  // namespace rateloss
