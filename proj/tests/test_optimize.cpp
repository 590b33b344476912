#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rateloss/entropy.hpp"
#include "rateloss/optimize.hpp"

using rateloss::g_entropy;
using rateloss::maximize_scalar;
using rateloss::minimize_scalar;
using rateloss::OptimizationResult;

TEST_CASE("minimize_scalar finds the quadratic vertex") {
  const auto res = minimize_scalar([](double x) { return (x - 0.5) * (x - 0.5); }, 0.0, 1.0, 1e-9);
  CHECK(std::abs(res.argopt - 0.5) <= 1e-9);
  CHECK(res.value <= 1e-17);
  CHECK(res.evaluations > 0);
}

TEST_CASE("minimize_scalar handles a boundary minimum") {
  const auto res = minimize_scalar([](double x) { return x; }, 0.0, 1.0, 1e-9);
  CHECK(res.argopt <= 1e-9);
  CHECK(res.value <= 1e-9);
}

TEST_CASE("maximize_scalar examples") {
  const auto quad = maximize_scalar([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
  CHECK(std::abs(quad.argopt - 0.3) <= 1e-9);

  const auto mue = maximize_scalar([](double mu) { return mu * std::exp(-mu); }, 0.0, 10.0);
  CHECK(std::abs(mue.argopt - 1.0) <= 1e-9);
  CHECK(mue.value == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("squash-transmittance objective is minimized at 1/2") {
  // the eta1-parameterized upper bound at (eta = 0.3, n_s = 5)
  const double eta = 0.3;
  const double ns = 5.0;
  auto objective = [&](double eta1) {
    return 0.5 * (g_entropy((1.0 - eta1 + eta * eta1) * ns) +
                  g_entropy((eta1 + eta * (1.0 - eta1)) * ns) -
                  g_entropy(eta1 * (1.0 - eta) * ns) -
                  g_entropy((1.0 - eta1) * (1.0 - eta) * ns));
  };
  const auto res = minimize_scalar(objective, 0.0, 1.0, 1e-9);
  CHECK(std::abs(res.argopt - 0.5) <= 1e-6);
}

TEST_CASE("optimizer tracks known extrema of random quadratics") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double c = uc(rng);
    const double scale = 0.5 + uc(rng);
    const auto res =
        minimize_scalar([=](double x) { return scale * (x - c) * (x - c); }, 0.0, 1.0, 1e-9);
    CHECK(std::abs(res.argopt - c) <= 1e-9);
    CHECK(res.argopt >= 0.0);
    CHECK(res.argopt <= 1.0);
  }
}

TEST_CASE("optimizer is deterministic") {
  auto f = [](double x) { return std::cos(3.0 * x) + 0.1 * x; };
  const auto a = minimize_scalar(f, 0.0, 2.0, 1e-10);
  const auto b = minimize_scalar(f, 0.0, 2.0, 1e-10);
  CHECK(a.argopt == b.argopt);
  CHECK(a.value == b.value);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("optimizer argument validation") {
  auto f = [](double x) { return x * x; };
  CHECK_THROWS_AS(minimize_scalar(f, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_scalar(f, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_scalar(f, 0.0, 1.0, -1e-9), std::invalid_argument);
  CHECK_THROWS_AS(minimize_scalar(f, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("non-finite objective values are rejected") {
  CHECK_THROWS_AS(minimize_scalar([](double x) { return std::log(x - 2.0); }, 0.0, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(maximize_scalar([](double) { return std::nan(""); }, 0.0, 1.0),
                  std::domain_error);
}
