#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rateloss/optimize.hpp"

namespace rateloss {

/// Whether the homodyne detector's loss and noise are attributed to the
/// eavesdropper (uncalibrated) or trusted as local imperfections
/// (calibrated).
enum class CvScenario { uncalibrated, calibrated };

/// Device model for the Gaussian-modulated coherent-state protocol.
struct CvParams {
  double reconciliation_efficiency = 1.0;  // beta
  double excess_noise = 0.0;               // epsilon, shot-noise units
  double detector_efficiency = 1.0;        // eta_d, homodyne quantum efficiency
  double electronic_noise = 0.0;           // v_el
  CvScenario scenario = CvScenario::uncalibrated;

  void validate() const {
    if (!(reconciliation_efficiency >= 0.0 && reconciliation_efficiency <= 1.0)) {
      throw std::domain_error("CvParams: reconciliation_efficiency must lie in [0,1]");
    }
    if (!(excess_noise >= 0.0) || !std::isfinite(excess_noise)) {
      throw std::domain_error("CvParams: excess_noise must be finite and >= 0");
    }
    if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0)) {
      throw std::domain_error("CvParams: detector_efficiency must lie in (0,1]");
    }
    if (!(electronic_noise >= 0.0) || !std::isfinite(electronic_noise)) {
      throw std::domain_error("CvParams: electronic_noise must be finite and >= 0");
    }
  }
};

/// The "methods" preset: state-of-the-art device figures.
inline CvParams cv_methods_preset(CvScenario scenario) {
  return CvParams{0.9, 0.005, 0.5, 0.01, scenario};
}

/// Noise referred to the channel input, in shot-noise units.
struct CvNoiseTerms {
  double channel = 0.0;   // delta_ch = (1-eta)/eta + excess_noise
  double homodyne = 0.0;  // delta_h  = (1+v_el)/eta_d - 1
  double total = 0.0;     // delta    = delta_ch + delta_h/eta
};

inline CvNoiseTerms cv_noise_terms(double eta, const CvParams& params) {
  params.validate();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error(
        "cv_noise_terms: eta must lie in (0,1] (the channel noise has a 1/eta singularity), "
        "got " +
        std::to_string(eta));
  }
  CvNoiseTerms nt;
  nt.channel = (1.0 - eta) / eta + params.excess_noise;
  nt.homodyne = (1.0 + params.electronic_noise) / params.detector_efficiency - 1.0;
  nt.total = nt.channel + nt.homodyne / eta;
  return nt;
}

/// I(A;B) = (1/2) log2((delta + v)/(delta + 1)) bits per channel use, for
/// modulation-inclusive variance v = v_A + 1.
inline double cv_mutual_information(double v, double delta) {
  if (!(v >= 1.0) || !std::isfinite(v)) {
    throw std::domain_error("cv_mutual_information: v must be finite and >= 1, got " +
                            std::to_string(v));
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::domain_error("cv_mutual_information: delta must be finite and >= 0, got " +
                            std::to_string(delta));
  }
  return 0.5 * std::log2((delta + v) / (delta + 1.0));
}

namespace detail {

// The Holevo algebra runs in long double: eigenvalue pairs become
// near-degenerate (true discriminant ~ (eta * excess_noise)^2) at v near 1,
// and double-precision noise in s^2 - 4q would otherwise swamp the
// +-1e-9 floor the results are held to.
using holevo_float = long double;

inline holevo_float sq(holevo_float x) { return x * x; }

inline holevo_float g_entropy_ld(holevo_float x) {
  if (x < 1e-300L) return 0.0L;
  return (x + 1.0L) * std::log1p(x) / std::numbers::ln2_v<holevo_float> - x * std::log2(x);
}

// g((lambda - 1)/2) from lambda^2, absorbing sub-vacuum rounding slack and
// rejecting anything genuinely below the vacuum value
inline holevo_float holevo_g_term(holevo_float lambda_sq, const char* label) {
  if (lambda_sq < 0.0L) {
    if (lambda_sq < -1e-9L) {
      throw std::domain_error(std::string("cv_holevo: negative squared symplectic eigenvalue ") +
                              label + " = " + std::to_string(static_cast<double>(lambda_sq)));
    }
    lambda_sq = 0.0L;
  }
  holevo_float x = (std::sqrt(lambda_sq) - 1.0L) / 2.0L;
  if (x < 0.0L) {
    if (x < -1e-7L) {
      throw std::domain_error(std::string("cv_holevo: symplectic eigenvalue ") + label +
                              " fell below the vacuum value");
    }
    x = 0.0L;
  }
  return g_entropy_ld(x);
}

// discriminant s^2 - 4q for the eigenvalue pair with sum s and product q,
// clamped at 0 within tolerance and rejected beyond it
inline holevo_float holevo_discriminant(holevo_float s, holevo_float q, const char* label) {
  holevo_float disc = sq(s) - 4.0L * q;
  if (disc < 0.0L) {
    if (disc < -1e-9L * std::max<holevo_float>(1.0L, sq(s))) {
      throw std::domain_error(std::string("cv_holevo: negative discriminant for ") + label);
    }
    disc = 0.0L;
  }
  return disc;
}

}  // namespace detail

/// Holevo information chi(B;E) in bits. In the uncalibrated scenario Eve
/// holds the homodyne imperfections:
///
///   chi = g(l1~) + g(l2~) - g(l3~),  lk~ = (lk - 1)/2,
///   l12^2 = (A +- sqrt(A^2 - 4B))/2,   l3^2 = v (1 + v delta)/(v + delta),
///   A = v^2 (1 - 2 eta eta_d) + 2 eta eta_d + {eta eta_d (v + delta)}^2,
///   B = {eta eta_d (v delta + 1)}^2.
///
/// In the calibrated scenario the detector noise delta_h stays outside Eve's
/// systems:
///
///   chi = g(l1'~) + g(l2'~) - g(l3'~) - g(l4'~),
///   l12'^2 = (A' +- sqrt(A'^2 - 4B'))/2,  l34'^2 = (C' +- sqrt(C'^2 - 4D'))/2,
///   A' = v^2 (1 - 2 eta) + 2 eta + {eta (v + delta_ch)}^2,
///   B' = {eta (v delta_ch + 1)}^2,
///   C' = (v sqrt(B') + eta (v + delta_ch) + A' delta_h) / (eta (v + delta)),
///   D' = (v sqrt(B') + B' delta_h) / (eta (v + delta)).
///
/// The result is floored at 0 (tolerance 1e-9 on the negative side).
inline double cv_holevo(double v, double eta, const CvParams& params) {
  if (!(v >= 1.0) || !std::isfinite(v)) {
    throw std::domain_error("cv_holevo: v must be finite and >= 1, got " + std::to_string(v));
  }
  params.validate();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("cv_holevo: eta must lie in (0,1], got " + std::to_string(eta));
  }

  using F = detail::holevo_float;
  const F vl = v;
  const F etal = eta;
  const F dch = (1.0L - etal) / etal + static_cast<F>(params.excess_noise);
  const F dh = (1.0L + static_cast<F>(params.electronic_noise)) /
                   static_cast<F>(params.detector_efficiency) -
               1.0L;
  const F delta = dch + dh / etal;

  // the smaller root of each pair comes from the root product (lam1^2 lam2^2
  // equals the constant term), not from (s - sqrt(disc))/2, which cancels
  // catastrophically once the discriminant dominates
  F chi = 0.0L;
  if (params.scenario == CvScenario::uncalibrated) {
    const F ed = etal * static_cast<F>(params.detector_efficiency);
    const F a = detail::sq(vl) * (1.0L - 2.0L * ed) + 2.0L * ed + detail::sq(ed * (vl + delta));
    const F b = detail::sq(ed * (vl * delta + 1.0L));
    const F s = std::sqrt(detail::holevo_discriminant(a, b, "(A, B)"));
    const F lam1_sq = (a + s) / 2.0L;
    const F lam2_sq = b / lam1_sq;
    const F lam3_sq = vl * (1.0L + vl * delta) / (vl + delta);
    chi = detail::holevo_g_term(lam1_sq, "lambda_1") +
          detail::holevo_g_term(lam2_sq, "lambda_2") -
          detail::holevo_g_term(lam3_sq, "lambda_3");
  } else {
    const F ap = detail::sq(vl) * (1.0L - 2.0L * etal) + 2.0L * etal +
                 detail::sq(etal * (vl + dch));
    const F bp = detail::sq(etal * (vl * dch + 1.0L));
    const F sqrt_bp = etal * (vl * dch + 1.0L);  // nonnegative on the domain
    const F denom = etal * (vl + delta);
    const F cp = (vl * sqrt_bp + etal * (vl + dch) + ap * dh) / denom;
    const F dp = (vl * sqrt_bp + bp * dh) / denom;
    const F s1 = std::sqrt(detail::holevo_discriminant(ap, bp, "(A', B')"));
    const F s2 = std::sqrt(detail::holevo_discriminant(cp, dp, "(C', D')"));
    const F lam1_sq = (ap + s1) / 2.0L;
    const F lam3_sq = (cp + s2) / 2.0L;
    chi = detail::holevo_g_term(lam1_sq, "lambda'_1") +
          detail::holevo_g_term(bp / lam1_sq, "lambda'_2") -
          detail::holevo_g_term(lam3_sq, "lambda'_3") -
          detail::holevo_g_term(dp / lam3_sq, "lambda'_4");
  }

  if (chi < 0.0L) {
    if (chi < -1e-9L) {
      throw std::domain_error("cv_holevo: Holevo information fell below the numerical floor");
    }
    chi = 0.0L;
  }
  return static_cast<double>(chi);
}

/// One evaluated operating point at modulation-inclusive variance v.
struct CvPoint {
  double v = 1.0;
  double delta_ch = 0.0;
  double delta_h = 0.0;
  double delta = 0.0;
  double mutual_information = 0.0;  // I(A;B)
  double holevo = 0.0;              // chi(B;E)
  double key_rate = 0.0;            // beta I - chi, repetition rate fixed to 1, not clamped
};

inline CvPoint cv_point(double v, double eta, const CvParams& params) {
  const CvNoiseTerms nt = cv_noise_terms(eta, params);
  CvPoint pt;
  pt.v = v;
  pt.delta_ch = nt.channel;
  pt.delta_h = nt.homodyne;
  pt.delta = nt.total;
  pt.mutual_information = cv_mutual_information(v, nt.total);
  pt.holevo = cv_holevo(v, eta, params);
  pt.key_rate = params.reconciliation_efficiency * pt.mutual_information - pt.holevo;
  return pt;
}

struct CvOptimum {
  double v_opt = 1.0;
  double key_rate = 0.0;    // max(0, max_v (beta I - chi))
  bool at_boundary = false; // v_opt ran into the search cap
};

// Search cap for the modulation variance. Noiseless channels have no
// interior optimum, so the cap is explicit and hitting it is reported.
inline constexpr double kCvModulationMax = 1e6;

/// Maximizes the key rate over v in [1, kCvModulationMax], scanning 256
/// log-spaced points before golden-section refinement. The rate is clamped
/// at 0; the boundary flag is set when v_opt >= 0.99 * kCvModulationMax.
inline CvOptimum cv_optimal_rate(double eta, const CvParams& params) {
  params.validate();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("cv_optimal_rate: eta must lie in (0,1], got " + std::to_string(eta));
  }
  const OptimizationResult res = maximize_scalar(
      [&](double u) { return cv_point(std::pow(10.0, u), eta, params).key_rate; }, 0.0,
      std::log10(kCvModulationMax), 1e-9, 256);
  const double v_opt = std::pow(10.0, res.argopt);
  return {v_opt, std::max(0.0, res.value), v_opt >= 0.99 * kCvModulationMax};
}

}  // namespace rateloss
