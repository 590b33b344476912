#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "rateloss/entropy.hpp"
#include "rateloss/optimize.hpp"

namespace rateloss {

/// Device model for the decoy-state BB84 rate.
struct DecoyParams {
  double visibility = 1.0;           // V, interference visibility at the receiver
  double bob_transmittance = 1.0;    // eta_B
  double detector_efficiency = 1.0;  // eta_d
  double dark_count = 0.0;           // p_d
  double ec_inefficiency = 1.0;      // f >= 1

  // misalignment error epsilon = (1 - V)/2
  double misalignment_error() const { return (1.0 - visibility) / 2.0; }

  void validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(visibility)) throw std::domain_error("DecoyParams: visibility must lie in [0,1]");
    if (!in01(bob_transmittance)) {
      throw std::domain_error("DecoyParams: bob_transmittance must lie in [0,1]");
    }
    if (!in01(detector_efficiency)) {
      throw std::domain_error("DecoyParams: detector_efficiency must lie in [0,1]");
    }
    if (!in01(dark_count)) throw std::domain_error("DecoyParams: dark_count must lie in [0,1]");
    if (!(ec_inefficiency >= 1.0) || !std::isfinite(ec_inefficiency)) {
      throw std::domain_error("DecoyParams: ec_inefficiency must be >= 1");
    }
  }
};

/// The "methods" preset: state-of-the-art device figures.
inline DecoyParams decoy_methods_preset() { return DecoyParams{0.99, 1.0, 0.2, 1e-6, 1.2}; }

/// One evaluated operating point at pulse intensity mu.
struct DecoyPoint {
  double mu = 0.0;
  double detection_rate = 0.0;  // R, per mode per pulse
  double y0 = 0.0;              // vacuum yield fraction
  double y1 = 0.0;              // single-photon yield fraction
  double eps1 = 0.0;            // single-photon error rate
  double qber = 0.0;            // Q
  double key_rate = 0.0;        // K = R {Y0 + Y1 (1 - h(eps1)) - f h(Q)}, not clamped
};

/// Evaluates the decoy-state rate model at intensity mu and channel
/// transmittance eta, with t = eta * eta_B * eta_d:
///
///   R    = (1 - e^{-mu t} (1 - 2 p_d)) (1 - p_d) / 2
///   Y0   = 2 p_d e^{-mu} / (1 - (1 - 2 p_d) e^{-mu t})
///   Y1   = mu e^{-mu} (t (1 - p_d) + 2 (1 - t) p_d) / (1 - (1 - 2 p_d) e^{-mu t})
///   eps1 = (t eps + (1 - t) p_d) / (t + 2 (1 - t) p_d)
///   Q    = (eps - (eps - p_d) e^{-mu t}) / (1 - (1 - 2 p_d) e^{-mu t})
///
/// kept exactly in this published form (note the Y0/Y1 numerators use
/// e^{-mu} while the shared denominator uses e^{-mu t}, and that the eps1
/// denominator is not the Y1 numerator structure). K may be negative; it is
/// clamped only by decoy_optimal_rate.
inline DecoyPoint decoy_point(double mu, double eta, const DecoyParams& params) {
  params.validate();
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::domain_error("decoy_point: mu must be finite and > 0, got " + std::to_string(mu));
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("decoy_point: eta must lie in [0,1], got " + std::to_string(eta));
  }

  const double pd = params.dark_count;
  const double eps = params.misalignment_error();
  const double t = eta * params.bob_transmittance * params.detector_efficiency;
  const double emt = std::exp(-mu * t);
  const double emu = std::exp(-mu);

  DecoyPoint pt;
  pt.mu = mu;
  pt.detection_rate = (1.0 - emt * (1.0 - 2.0 * pd)) * (1.0 - pd) / 2.0;

  const double denom = 1.0 - (1.0 - 2.0 * pd) * emt;
  if (denom > 0.0) {
    pt.y0 = 2.0 * pd * emu / denom;
    pt.y1 = mu * emu * (t * (1.0 - pd) + 2.0 * (1.0 - t) * pd) / denom;
    pt.qber = (eps - (eps - pd) * emt) / denom;
  }
  // denom == 0 only when t == 0 with no dark counts: nothing clicks and the
  // yield fractions and QBER are left at 0 (R is 0 there as well)

  const double edenom = t + 2.0 * (1.0 - t) * pd;
  pt.eps1 = edenom > 0.0 ? (t * eps + (1.0 - t) * pd) / edenom : 0.0;

  if (!(pt.qber >= 0.0 && pt.qber <= 1.0)) {
    throw std::domain_error("decoy_point: QBER fell outside [0,1] (Q = " +
                            std::to_string(pt.qber) + ")");
  }
  if (!(pt.eps1 >= 0.0 && pt.eps1 <= 1.0)) {
    throw std::domain_error("decoy_point: single-photon error rate fell outside [0,1] (eps1 = " +
                            std::to_string(pt.eps1) + ")");
  }

  pt.key_rate = pt.detection_rate *
                (pt.y0 + pt.y1 * (1.0 - binary_entropy(pt.eps1)) -
                 params.ec_inefficiency * binary_entropy(pt.qber));
  return pt;
}

struct DecoyOptimum {
  double mu_opt = 0.0;
  double key_rate = 0.0;  // max(0, max_mu K)
};

inline constexpr double kDecoyMuMax = 2.0;

/// Maximizes the key rate over the pulse intensity mu in (0, kDecoyMuMax]
/// with a 256-point pre-scan plus golden-section refinement. The rate is
/// clamped at 0; mu_opt reports the raw maximizer even when clamped.
inline DecoyOptimum decoy_optimal_rate(double eta, const DecoyParams& params) {
  params.validate();
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("decoy_optimal_rate: eta must lie in [0,1], got " +
                            std::to_string(eta));
  }
  const double mu_lo = kDecoyMuMax / 256.0;
  const OptimizationResult res = maximize_scalar(
      [&](double mu) { return decoy_point(mu, eta, params).key_rate; }, mu_lo, kDecoyMuMax, 1e-9,
      256);
  return {res.argopt, std::max(0.0, res.value)};
}

}  // namespace rateloss
