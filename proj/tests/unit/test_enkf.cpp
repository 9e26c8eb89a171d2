#include <gtest/gtest.h>

#include "enkpf/enkf.hpp"
#include "oracles.hpp"

using namespace enkpf;

namespace {

LinearGaussianObservation scalar(double r, double y) {
  return LinearGaussianObservation(ObservationOperator::select({0}, 1),
                                   Eigen::MatrixXd::Constant(1, 1, r),
                                   Eigen::VectorXd::Constant(1, y));
}

}  // namespace

TEST(Enkf, IdenticalParticlesUnchanged) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(4, 6, -0.25);
  const auto obs = LinearGaussianObservation::diagonal({1, 3}, 4, 0.5, Eigen::VectorXd::Ones(2));
  const Ensemble out = enkf_update(Ensemble(x), obs, TaperSpec::none(), RandomStreams(1));
  EXPECT_EQ((out.states() - x).norm(), 0.0);
}

TEST(Enkf, HugeNoiseLeavesEnsemble) {
  oracle::Rng rng(2);
  const Eigen::MatrixXd x = oracle::normal_matrix(rng, 1, 50);
  const Ensemble out = enkf_update(Ensemble(x), scalar(1e12, 3.0), TaperSpec::none(), RandomStreams(2));
  for (int j = 0; j < 50; ++j) {
    EXPECT_NEAR(out.states()(0, j), x(0, j), 1e-4 * std::max(1.0, std::abs(x(0, j))));
  }
}

TEST(Enkf, ZeroPerturbationIsAffineMap) {
  oracle::Rng rng(3);
  const Eigen::MatrixXd x = oracle::normal_matrix(rng, 5, 12);
  const auto obs = LinearGaussianObservation::diagonal({0, 1, 4}, 5, 0.4, Eigen::VectorXd::Constant(3, 0.2));
  const Eigen::MatrixXd p = sample_moments(x).covariance;
  const Eigen::MatrixXd h = obs.op().to_dense();
  const Eigen::MatrixXd k = oracle::gain_by_inverse(p, h, obs.noise_cov(), 1.0);
  const Eigen::MatrixXd out =
      enkf_analysis(x, obs, kalman_gain(p, obs), Eigen::MatrixXd::Zero(3, 12));
  const Eigen::MatrixXd ref = x + k * ((-(h * x)).colwise() + obs.value());
  EXPECT_LT((out - ref).norm(), 1e-12);
}

TEST(Enkf, ConjugateScalarPosterior) {
  oracle::Rng rng(4);
  const Eigen::Index n = 100000;
  const Eigen::MatrixXd x = oracle::normal_matrix(rng, 1, n);
  const Ensemble out = enkf_update(Ensemble(x), scalar(1.0, 1.0), TaperSpec::none(), RandomStreams(4));
  oracle::RunningStats s;
  for (Eigen::Index j = 0; j < n; ++j) s.add(out.states()(0, j));
  const double var = s.variance();
  EXPECT_NEAR(s.mean, 0.5, 3.0 * std::sqrt(0.5 / n));
  EXPECT_NEAR(var, 0.5, 3.0 * 0.5 * std::sqrt(2.0 / (n - 1.0)));
}

TEST(Enkf, TaperAndMomentOverloadsAgree) {
  oracle::Rng rng(5);
  const Ensemble ens(oracle::normal_matrix(rng, 10, 8));
  const auto obs = LinearGaussianObservation::diagonal({0, 5}, 10, 0.5, Eigen::VectorXd::Ones(2));
  const TaperSpec t = TaperSpec::triangular(3.0);
  const Ensemble a = enkf_update(ens, obs, t, RandomStreams(5));
  const Ensemble b = enkf_update(ens, obs, tapered_covariance(ens, t), RandomStreams(5));
  EXPECT_EQ((a.states() - b.states()).norm(), 0.0);
}
