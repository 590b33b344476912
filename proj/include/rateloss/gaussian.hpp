#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rateloss/entropy.hpp"

namespace rateloss {

/// Covariance matrix of a zero-mean Gaussian state of n bosonic modes, in the
/// convention where the vacuum is the identity matrix. The x and p quadrature
/// blocks are stored separately; states with x-p cross-correlations are
/// outside this representation (every state handled here has none).
class CovarianceMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;
  static constexpr double kPhysicalityTol = 1e-9;

  static CovarianceMatrix from_blocks(Eigen::MatrixXd x, Eigen::MatrixXd p) {
    if (x.rows() == 0 || x.rows() != x.cols() || p.rows() != x.rows() || p.cols() != x.cols()) {
      throw std::invalid_argument("CovarianceMatrix: blocks must be square and of equal size");
    }
    require_symmetric(x, "x");
    require_symmetric(p, "p");
    x = ((x + x.transpose()) / 2.0).eval();
    p = ((p + p.transpose()) / 2.0).eval();
    return CovarianceMatrix(std::move(x), std::move(p));
  }

  std::size_t modes() const { return static_cast<std::size_t>(x_.rows()); }
  const Eigen::MatrixXd& x_block() const { return x_; }
  const Eigen::MatrixXd& p_block() const { return p_; }

 private:
  CovarianceMatrix(Eigen::MatrixXd x, Eigen::MatrixXd p) : x_(std::move(x)), p_(std::move(p)) {}

  static void require_symmetric(const Eigen::MatrixXd& m, const char* which) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
      throw std::invalid_argument(std::string("CovarianceMatrix: ") + which +
                                  " block is not symmetric");
    }
  }

  Eigen::MatrixXd x_;
  Eigen::MatrixXd p_;
};

/// Single-mode vacuum (identity blocks), or n-mode when requested.
inline CovarianceMatrix vacuum_state(std::size_t modes = 1) {
  if (modes < 1) throw std::invalid_argument("vacuum_state: needs at least one mode");
  const auto n = static_cast<Eigen::Index>(modes);
  return CovarianceMatrix::from_blocks(Eigen::MatrixXd::Identity(n, n),
                                       Eigen::MatrixXd::Identity(n, n));
}

/// Single-mode thermal state with mean photon number N: both blocks [1 + 2N].
inline CovarianceMatrix thermal_state(double mean_photons) {
  if (!std::isfinite(mean_photons) || mean_photons < 0.0) {
    throw std::domain_error("thermal_state: mean photon number must be finite and >= 0, got " +
                            std::to_string(mean_photons));
  }
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = 1.0 + 2.0 * mean_photons;
  return CovarianceMatrix::from_blocks(b, b);
}

/// Block-diagonal extension by k vacuum modes.
inline CovarianceMatrix append_vacuum(const CovarianceMatrix& cov, std::size_t k) {
  if (k < 1) throw std::invalid_argument("append_vacuum: k must be >= 1");
  const auto n = static_cast<Eigen::Index>(cov.modes());
  const auto m = n + static_cast<Eigen::Index>(k);
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
  x.topLeftCorner(n, n) = cov.x_block();
  p.topLeftCorner(n, n) = cov.p_block();
  return CovarianceMatrix::from_blocks(std::move(x), std::move(p));
}

/// Beamsplitter of transmittance tau coupling modes i and j, applied as the
/// congruence S gamma S^T with the same orthogonal block
///
///   [  sqrt(tau)    sqrt(1-tau) ]
///   [ -sqrt(1-tau)  sqrt(tau)   ]
///
/// embedded on (i, j) in both quadratures.
inline CovarianceMatrix beamsplitter(const CovarianceMatrix& cov, std::size_t i, std::size_t j,
                                     double tau) {
  const auto n = cov.modes();
  if (i >= n || j >= n) throw std::out_of_range("beamsplitter: mode index out of range");
  if (i == j) throw std::invalid_argument("beamsplitter: modes i and j must be distinct");
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("beamsplitter: transmittance must lie in [0,1], got " +
                            std::to_string(tau));
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
  const double c = std::sqrt(tau);
  const double r = std::sqrt(1.0 - tau);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  s(ii, ii) = c;
  s(ii, jj) = r;
  s(jj, ii) = -r;
  s(jj, jj) = c;
  return CovarianceMatrix::from_blocks(s * cov.x_block() * s.transpose(),
                                       s * cov.p_block() * s.transpose());
}

/// Marginal state on the kept modes: the principal submatrix of both blocks,
/// in the order the indices are given.
inline CovarianceMatrix partial_trace(const CovarianceMatrix& cov,
                                      const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
  for (std::size_t a = 0; a < keep.size(); ++a) {
    if (keep[a] >= cov.modes()) throw std::out_of_range("partial_trace: mode index out of range");
    for (std::size_t b = a + 1; b < keep.size(); ++b) {
      if (keep[a] == keep[b]) {
        throw std::invalid_argument("partial_trace: duplicate mode index in keep set");
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd x(m, m);
  Eigen::MatrixXd p(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const auto ka = static_cast<Eigen::Index>(keep[static_cast<std::size_t>(a)]);
      const auto kb = static_cast<Eigen::Index>(keep[static_cast<std::size_t>(b)]);
      x(a, b) = cov.x_block()(ka, kb);
      p(a, b) = cov.p_block()(ka, kb);
    }
  }
  return CovarianceMatrix::from_blocks(std::move(x), std::move(p));
}

/// Symplectic spectrum, sorted descending: the square roots of the
/// eigenvalues of the (symmetrized) product x_block * p_block. With equal
/// blocks these are just the eigenvalues of the common block. Throws if any
/// eigenvalue falls below 1 beyond the physicality tolerance.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cov) {
  Eigen::MatrixXd m = cov.x_block() * cov.p_block();
  m = ((m + m.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symplectic_eigenvalues: eigensolver failed");
  }
  std::vector<double> nu(cov.modes());
  for (std::size_t k = 0; k < nu.size(); ++k) {
    nu[k] = std::sqrt(std::max(0.0, es.eigenvalues()[static_cast<Eigen::Index>(k)]));
  }
  std::sort(nu.begin(), nu.end(), std::greater<>());
  if (nu.back() < 1.0 - CovarianceMatrix::kPhysicalityTol) {
    throw std::domain_error("symplectic_eigenvalues: matrix is not physical (nu_min = " +
                            std::to_string(nu.back()) + ")");
  }
  return nu;
}

/// Entropy in bits: sum of g((nu_k - 1)/2) over the symplectic spectrum.
inline double von_neumann_entropy(const CovarianceMatrix& cov) {
  double h = 0.0;
  for (const double nu : symplectic_eigenvalues(cov)) {
    h += g_entropy(std::max(0.0, (nu - 1.0) / 2.0));
  }
  return h;
}

}  // namespace rateloss
