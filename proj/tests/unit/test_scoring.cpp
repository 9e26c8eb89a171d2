#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enkpf/error.hpp"
#include "enkpf/scoring.hpp"
#include "oracles.hpp"

using namespace enkpf;

namespace {

double crps_of(const std::vector<double>& x, double t) {
  return crps(std::span<const double>(x.data(), x.size()), t);
}

}  // namespace

TEST(Rmse, Examples) {
  Eigen::MatrixXd x(2, 2);
  x << 0.5, 1.5, -1, 1;
  EXPECT_EQ(rmse(x, Eigen::Vector2d(1.0, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(rmse(Eigen::MatrixXd::Ones(1, 3), Eigen::VectorXd::Zero(1)), 1.0);
  EXPECT_DOUBLE_EQ(rmse(Eigen::MatrixXd::Ones(2, 4), Eigen::VectorXd::Zero(2)), 1.0);
  EXPECT_THROW(rmse(x, Eigen::VectorXd::Zero(3)), InvalidParameterError);
}

TEST(Crps, Examples) {
  EXPECT_DOUBLE_EQ(crps_of({2.5}, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(crps_of({0.0, 1.0}, 0.5), 0.25);
  EXPECT_NEAR(oracle::crps_quadrature({0.0, 1.0}, 0.5, 1e-6), 0.25, 1e-5);
  EXPECT_EQ(crps_of({0.3, 0.3, 0.3, 0.3}, 0.3), 0.0);
  EXPECT_EQ(crps_of(std::vector<double>(37, -1.1), -1.1), 0.0);
}

TEST(Crps, MatchesPairwiseAndQuadrature) {
  oracle::Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = oracle::uniform(rng, -2.0, 2.0);
    const double t = oracle::uniform(rng, -2.5, 2.5);
    const double c = crps_of(x, t);
    EXPECT_NEAR(c, oracle::crps_pairwise(x, t), 1e-12);
    // Piecewise constant integrand: trapezoid error <= (jumps) * step / 2.
    EXPECT_NEAR(c, oracle::crps_quadrature(x, t, 1e-7), 1e-6);
  }
}

TEST(Crps, NonnegativeAndZeroOnlyAtTruth) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = oracle::uniform(rng, -3.0, 3.0);
    EXPECT_GT(crps_of(x, oracle::uniform(rng, -3.0, 3.0)), 0.0);
  }
}

TEST(Scores, InvariantUnderReordering) {
  oracle::Rng rng(3);
  Eigen::MatrixXd x = oracle::normal_matrix(rng, 5, 40);
  const Eigen::VectorXd t = oracle::normal_matrix(rng, 5, 1).col(0);
  const double r = rmse(x, t);
  const double c = crps(x, 1, t[1]);
  std::vector<int> perm(40);
  for (int j = 0; j < 40; ++j) perm[j] = j;
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd y(5, 40);
  for (int j = 0; j < 40; ++j) y.col(j) = x.col(perm[j]);
  EXPECT_NEAR(rmse(y, t), r, 1e-15);
  EXPECT_EQ(crps(y, 1, t[1]), c);
}

TEST(Curvature, ConstantIsZero) {
  EXPECT_EQ(curvature(Eigen::VectorXd::Constant(128, 3.0)), 0.0);
}

TEST(Curvature, SineMatchesQuadrature) {
  const double pi = std::numbers::pi;
  Eigen::VectorXd x(128);
  for (int i = 0; i < 128; ++i) x[i] = std::sin(pi * (-1.0 + 2.0 * i / 128.0));
  const double exact = oracle::simpson(
      [pi](double s) {
        const double d1 = pi * std::cos(pi * s);
        const double d2 = -pi * pi * std::sin(pi * s);
        return std::abs(d2) * std::pow(1.0 + d1 * d1, -1.5);
      },
      -1.0, 1.0, 200000);
  EXPECT_NEAR(curvature(x) / exact, 1.0, 0.01);
}

TEST(Curvature, SmallAmplitudeLimit) {
  const double pi = std::numbers::pi;
  Eigen::VectorXd x(128);
  for (int i = 0; i < 128; ++i) x[i] = std::sin(pi * (-1.0 + 2.0 * i / 128.0));
  const double alpha = 1e-6;
  // Same discretization of int |x''| without the slope factor.
  const double h = 2.0 / 128.0;
  double flat = 0.0;
  for (int i = 0; i < 128; ++i) {
    flat += std::abs(x[(i + 1) % 128] - 2.0 * x[i] + x[(i + 127) % 128]) / (h * h);
  }
  flat *= h;
  EXPECT_NEAR(curvature(alpha * x) / (alpha * flat), 1.0, 1e-3);
  // and against the continuum value 4 pi.
  EXPECT_NEAR(curvature(alpha * x) / (alpha * 4.0 * pi), 1.0, 1e-3);
}
