#include <gtest/gtest.h>

#include <set>

#include "enkpf/particle_filter.hpp"
#include "oracles.hpp"

using namespace enkpf;

namespace {

LinearGaussianObservation scalar(double r, double y) {
  return LinearGaussianObservation(ObservationOperator::select({0}, 1),
                                   Eigen::MatrixXd::Constant(1, 1, r),
                                   Eigen::VectorXd::Constant(1, y));
}

}  // namespace

TEST(ParticleFilter, IdenticalParticles) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 8, 1.5);
  const auto obs = LinearGaussianObservation::diagonal({0, 2}, 3, 0.3, Eigen::VectorXd::Ones(2));
  const PfResult r = pf_update(Ensemble(x), obs, RandomStreams(1));
  EXPECT_TRUE(r.weights.values().isApproxToConstant(1.0 / 8.0, 1e-15));
  EXPECT_EQ((r.ensemble.states() - x).norm(), 0.0);
  EXPECT_DOUBLE_EQ(r.diagnostics.ess, 8.0);
  EXPECT_DOUBLE_EQ(r.diagnostics.div, 8.0);
}

TEST(ParticleFilter, FarParticleRatio) {
  Eigen::MatrixXd x(1, 2);
  x << 0.0, 10.0;
  const PfResult r = pf_update(Ensemble(x), scalar(1.0, 0.0), RandomStreams(2));
  EXPECT_NEAR(std::log(r.weights[0] / r.weights[1]), 50.0, 1e-9);
  EXPECT_LT(r.weights[1], 1e-21);
}

TEST(ParticleFilter, SymmetricPair) {
  Eigen::MatrixXd x(1, 2);
  x << -1.3, 1.3;
  const PfResult r = pf_update(Ensemble(x), scalar(0.7, 0.0), RandomStreams(3));
  EXPECT_DOUBLE_EQ(r.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(r.weights[1], 0.5);
  EXPECT_EQ(r.ensemble.states()(0, 0), -1.3);
  EXPECT_EQ(r.ensemble.states()(0, 1), 1.3);
}

TEST(ParticleFilter, WeightsMatchDensities) {
  oracle::Rng rng(4);
  const Eigen::MatrixXd x = oracle::normal_matrix(rng, 3, 30);
  Eigen::MatrixXd r = oracle::random_spd(rng, 2);
  const LinearGaussianObservation obs(ObservationOperator::select({0, 2}, 3), r,
                                      Eigen::VectorXd::Constant(2, 0.4));
  const PfResult res = pf_update(Ensemble(x), obs, RandomStreams(4));
  Eigen::VectorXd ref(30);
  for (int j = 0; j < 30; ++j) {
    Eigen::VectorXd hx(2);
    hx << x(0, j), x(2, j);
    ref[j] = std::exp(oracle::log_mvn_pdf(obs.value(), hx, r));
  }
  ref /= ref.sum();
  EXPECT_LT((res.weights.values() - ref).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(ParticleFilter, OutputIsSubsetOfInput) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = oracle::normal_matrix(rng, 2, 25);
    const auto obs = LinearGaussianObservation::diagonal({1}, 2, 0.2, Eigen::VectorXd::Constant(1, 0.5));
    const PfResult r = pf_update(Ensemble(x), obs, RandomStreams(100 + trial));
    std::set<std::pair<double, double>> in;
    for (int j = 0; j < 25; ++j) in.insert({x(0, j), x(1, j)});
    for (int j = 0; j < 25; ++j) {
      EXPECT_TRUE(in.count({r.ensemble.states()(0, j), r.ensemble.states()(1, j)}));
    }
  }
}

TEST(ParticleFilter, LogWeightsShiftInvariant) {
  Eigen::MatrixXd x(1, 3);
  x << 0.0, 1.0, 2.0;
  const auto a = WeightVector::from_log(log_weights(x, scalar(1.0, 0.5)));
  const auto b = WeightVector::from_log(log_weights(x, scalar(1.0, 0.5)).array() - 700.0);
  EXPECT_LT((a.values() - b.values()).norm(), 1e-15);
}

TEST(ParticleFilter, TinyNoiseDoesNotUnderflow) {
  Eigen::MatrixXd x(1, 3);
  x << 0.0, 1.0, 2.0;
  const PfResult r = pf_update(Ensemble(x), scalar(1e-6, 0.9), RandomStreams(6));
  EXPECT_EQ(r.weights[1], 1.0);
}
