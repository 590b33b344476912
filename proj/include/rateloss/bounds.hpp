#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "rateloss/entropy.hpp"
#include "rateloss/optimize.hpp"

namespace rateloss {

/// A channel operating point: transmittance eta plus an optional mean photon
/// number constraint. An absent n_s selects the infinite-energy closed forms
/// rather than a large-number stand-in.
struct ChannelPoint {
  double eta = 0.0;
  std::optional<double> n_s{};

  void validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::domain_error("ChannelPoint: eta must lie in [0,1], got " + std::to_string(eta));
    }
    if (n_s && (!std::isfinite(*n_s) || *n_s < 0.0)) {
      throw std::domain_error("ChannelPoint: n_s must be finite and >= 0");
    }
  }
};

/// Security/reliability parameter and block length for the finite-block
/// weak-converse adjustment. The bound degenerates once 16*sqrt(epsilon)
/// reaches 1, so epsilon is restricted to (0, 1/256).
struct SecurityBudget {
  double epsilon = 0.0;
  std::uint64_t n_uses = 0;

  void validate() const {
    if (!(epsilon > 0.0) || !(16.0 * std::sqrt(epsilon) < 1.0)) {
      throw std::domain_error(
          "SecurityBudget: epsilon must satisfy 0 < epsilon and 16*sqrt(epsilon) < 1, got " +
          std::to_string(epsilon));
    }
    if (n_uses < 1) throw std::domain_error("SecurityBudget: n_uses must be >= 1");
  }
};

namespace detail {

inline void check_eta_closed(double eta, const char* fn) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error(std::string(fn) + ": eta must lie in [0,1], got " +
                            std::to_string(eta));
  }
}

inline void check_ns(double n_s, const char* fn) {
  if (!std::isfinite(n_s) || n_s < 0.0) {
    throw std::domain_error(std::string(fn) + ": n_s must be finite and >= 0, got " +
                            std::to_string(n_s));
  }
}

}  // namespace detail

/// Upper bound log2((1+eta)/(1-eta)) in key bits per mode. Returns +inf at
/// eta = 1 so that sweeps can include the lossless endpoint.
inline double tgw_bound(double eta) {
  detail::check_eta_closed(eta, "tgw_bound");
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  return (std::log1p(eta) - std::log1p(-eta)) / std::numbers::ln2;
}

/// Energy-constrained upper bound g((1+eta) n_s / 2) - g((1-eta) n_s / 2),
/// increasing in both arguments and converging to tgw_bound as n_s grows.
inline double tgw_bound_finite_energy(double eta, double n_s) {
  detail::check_eta_closed(eta, "tgw_bound_finite_energy");
  detail::check_ns(n_s, "tgw_bound_finite_energy");
  return g_entropy((1.0 + eta) * n_s / 2.0) - g_entropy((1.0 - eta) * n_s / 2.0);
}

/// Upper bound evaluated at an explicit squash transmittance eta1:
///
///   (1/2) [ g((1-eta1+eta*eta1) n_s) + g((eta1+eta(1-eta1)) n_s)
///         - g(eta1 (1-eta) n_s)     - g((1-eta1)(1-eta) n_s) ]
///
/// Symmetric and convex in eta1, minimized at eta1 = 1/2 where it equals
/// tgw_bound_finite_energy.
inline double tgw_bound_at_squash(double eta, double n_s, double eta1) {
  detail::check_eta_closed(eta, "tgw_bound_at_squash");
  detail::check_ns(n_s, "tgw_bound_at_squash");
  if (!(eta1 >= 0.0 && eta1 <= 1.0)) {
    throw std::domain_error("tgw_bound_at_squash: eta1 must lie in [0,1], got " +
                            std::to_string(eta1));
  }
  return 0.5 * (g_entropy((1.0 - eta1 + eta * eta1) * n_s) +
                g_entropy((eta1 + eta * (1.0 - eta1)) * n_s) -
                g_entropy(eta1 * (1.0 - eta) * n_s) -
                g_entropy((1.0 - eta1) * (1.0 - eta) * n_s));
}

/// Reverse-coherent-information lower bound -log2(1-eta) in key bits per
/// mode; +inf at eta = 1.
inline double rci_lower_bound(double eta) {
  detail::check_eta_closed(eta, "rci_lower_bound");
  if (eta == 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-eta) / std::numbers::ln2;
}

/// Ideal single-photon BB84 benchmark: eta/2 key bits per mode.
inline double ideal_bb84_rate(double eta) {
  detail::check_eta_closed(eta, "ideal_bb84_rate");
  return eta / 2.0;
}

/// Bound for a channel used in both directions: 2 log2((1+eta)/(1-eta)) key
/// bits per mode transmitted in both directions.
inline double two_way_bound(double eta) {
  detail::check_eta_closed(eta, "two_way_bound");
  return 2.0 * tgw_bound(eta);
}

/// Finite-block weak-converse adjustment
///
///   R <= (E_sq + 4 h2(2 sqrt(eps)) / n) / (1 - 16 sqrt(eps)).
///
/// e_sq defaults to tgw_bound(eta); pass tgw_bound_finite_energy(eta, n_s)
/// to apply the adjustment under an energy constraint.
inline double finite_n_bound(double eta, const SecurityBudget& budget,
                             std::optional<double> e_sq = {}) {
  detail::check_eta_closed(eta, "finite_n_bound");
  budget.validate();
  const double base = e_sq ? *e_sq : tgw_bound(eta);
  const double root = std::sqrt(budget.epsilon);
  const double correction = 4.0 * binary_entropy(2.0 * root) / static_cast<double>(budget.n_uses);
  return (base + correction) / (1.0 - 16.0 * root);
}

/// Minimizes tgw_bound_at_squash over the squash transmittance. The minimum
/// sits at eta1 = 1/2 with value tgw_bound_finite_energy(eta, n_s); exposed
/// as an optimization so that property can be checked rather than assumed.
inline OptimizationResult optimal_squash(double eta, double n_s) {
  detail::check_eta_closed(eta, "optimal_squash");
  if (!std::isfinite(n_s) || !(n_s > 0.0)) {
    throw std::domain_error("optimal_squash: n_s must be finite and > 0");
  }
  return minimize_scalar([=](double eta1) { return tgw_bound_at_squash(eta, n_s, eta1); }, 0.0,
                         1.0, 1e-9);
}

}  // namespace rateloss
