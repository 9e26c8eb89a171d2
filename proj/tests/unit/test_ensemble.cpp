#include <gtest/gtest.h>

#include "enkpf/ensemble.hpp"
#include "enkpf/error.hpp"
#include "oracles.hpp"

using namespace enkpf;

TEST(Ensemble, RejectsDegenerateShapes) {
  EXPECT_THROW(Ensemble(Eigen::MatrixXd::Zero(3, 1)), DegenerateEnsembleError);
  EXPECT_THROW(Ensemble(Eigen::MatrixXd::Zero(0, 4)), DegenerateEnsembleError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 3);
  bad(1, 2) = std::nan("");
  EXPECT_THROW(Ensemble{bad}, Error);
}

TEST(SampleMoments, TwoScalarParticles) {
  Eigen::MatrixXd x(1, 2);
  x << 0.0, 2.0;
  const auto m = sample_moments(x);
  EXPECT_DOUBLE_EQ(m.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(m.covariance(0, 0), 2.0);
}

TEST(SampleMoments, IdenticalColumnsGiveZeroCovariance) {
  Eigen::MatrixXd x = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0).replicate(1, 6);
  const auto m = sample_moments(x);
  EXPECT_TRUE((m.covariance.array() == 0.0).all());
}

TEST(SampleMoments, SquareCorners) {
  Eigen::MatrixXd x(2, 4);
  x << 0, 1, 0, 1,
       0, 0, 1, 1;
  const auto m = sample_moments(x);
  EXPECT_DOUBLE_EQ(m.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(m.mean[1], 0.5);
  EXPECT_NEAR(m.covariance(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.covariance(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(m.covariance(0, 1), 0.0);
}

TEST(SampleMoments, MatchesTwoPassFormula) {
  oracle::Rng rng(5);
  const Eigen::MatrixXd x = oracle::normal_matrix(rng, 6, 30);
  const auto m = sample_moments(x);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(6, 6);
  const Eigen::VectorXd mean = x.rowwise().sum() / 30.0;
  for (int j = 0; j < 30; ++j) {
    const Eigen::VectorXd d = x.col(j) - mean;
    ref += d * d.transpose();
  }
  ref /= 29.0;
  EXPECT_LT((m.covariance - ref).norm(), 1e-12);
  EXPECT_EQ((m.covariance - m.covariance.transpose()).norm(), 0.0);
}

TEST(Distance, LineAndRing) {
  EXPECT_EQ(component_distance(0, 39, 40, Topology::Line), 39.0);
  EXPECT_EQ(component_distance(0, 39, 40, Topology::Ring), 1.0);
  EXPECT_EQ(component_distance(5, 25, 40, Topology::Ring), 20.0);
}

TEST(Taper, Triangular) {
  const auto c = taper_matrix(TaperSpec::triangular(10.0), 30);
  EXPECT_EQ(c(3, 3), 1.0);
  EXPECT_DOUBLE_EQ(c(0, 5), 0.5);
  EXPECT_EQ(c(0, 10), 0.0);
  EXPECT_EQ(c(0, 25), 0.0);
}

TEST(Taper, GaspariCohnSupportAndMidpoint) {
  EXPECT_EQ(gaspari_cohn(0.0), 1.0);
  EXPECT_EQ(gaspari_cohn(2.0), 0.0);
  EXPECT_EQ(gaspari_cohn(3.5), 0.0);
  // Both branches evaluated at r = 1 by hand.
  const double inner = 1.0 - 5.0 / 3.0 + 5.0 / 8.0 + 0.5 - 0.25;
  const double outer = 4.0 - 5.0 + 5.0 / 3.0 + 5.0 / 8.0 - 0.5 + 1.0 / 12.0 - 2.0 / 3.0;
  EXPECT_NEAR(inner, 5.0 / 24.0, 1e-15);
  EXPECT_NEAR(outer, 5.0 / 24.0, 1e-15);
  EXPECT_NEAR(gaspari_cohn(1.0), 5.0 / 24.0, 1e-15);
  const auto c = taper_matrix(TaperSpec::gaspari_cohn(10.0), 40);
  EXPECT_NEAR(c(0, 10), 5.0 / 24.0, 1e-15);
}

TEST(Taper, GaspariCohnContinuity) {
  for (const double r : {1.0, 2.0}) {
    EXPECT_NEAR(gaspari_cohn(r - 1e-13), gaspari_cohn(r + 1e-13), 1e-12);
  }
}

TEST(Taper, NoneIsAllOnes) {
  EXPECT_TRUE((taper_matrix(TaperSpec::none(), 7).array() == 1.0).all());
}

TEST(Taper, NonpositiveSupportRejected) {
  EXPECT_THROW(taper_matrix(TaperSpec::triangular(0.0), 5), InvalidParameterError);
  EXPECT_THROW(taper_matrix(TaperSpec::gaspari_cohn(-1.0), 5), InvalidParameterError);
}

TEST(Taper, InvariantsOnRandomSpecs) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index q = 2 + static_cast<Eigen::Index>(rng() % 60);
    const double s = oracle::uniform(rng, 0.5, 25.0);
    const Topology t = rng() % 2 ? Topology::Ring : Topology::Line;
    const TaperSpec spec = rng() % 2 ? TaperSpec::triangular(s, t) : TaperSpec::gaspari_cohn(s, t);
    const double reach = spec.kind == TaperKind::Triangular ? s : 2.0 * s;
    const auto c = taper_matrix(spec, q);
    for (Eigen::Index i = 0; i < q; ++i) {
      EXPECT_EQ(c(i, i), 1.0);
      for (Eigen::Index k = 0; k < q; ++k) {
        EXPECT_EQ(c(i, k), c(k, i));
        EXPECT_GE(c(i, k), 0.0);
        EXPECT_LE(c(i, k), 1.0);
        if (component_distance(i, k, q, t) > reach) EXPECT_EQ(c(i, k), 0.0);
      }
    }
  }
}

TEST(Taper, RingIsCirculant) {
  const Eigen::Index q = 40;
  const auto c = taper_matrix(TaperSpec::gaspari_cohn(10.0, Topology::Ring), q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index k = 0; k < q; ++k) {
      EXPECT_EQ(c((i + 1) % q, (k + 1) % q), c(i, k));
    }
  }
}

TEST(TaperedCovariance, NoneMatchesSampleMoments) {
  oracle::Rng rng(2);
  const Ensemble ens(oracle::normal_matrix(rng, 5, 12));
  const auto a = tapered_covariance(ens, TaperSpec::none());
  const auto b = sample_moments(ens);
  EXPECT_EQ((a.covariance - b.covariance).norm(), 0.0);
  EXPECT_EQ((a.mean - b.mean).norm(), 0.0);
}

TEST(TaperedCovariance, DiagonalUnchanged) {
  oracle::Rng rng(3);
  const Ensemble ens(oracle::normal_matrix(rng, 8, 10));
  const auto raw = sample_moments(ens);
  const auto tap = tapered_covariance(ens, TaperSpec::triangular(2.0));
  EXPECT_EQ((raw.covariance.diagonal() - tap.covariance.diagonal()).norm(), 0.0);

  Eigen::MatrixXd x(2, 4);
  x << 1, -1, 1, -1,
       1, 1, -1, -1;
  const auto d = tapered_covariance(Ensemble(x), TaperSpec::triangular(1.5));
  EXPECT_EQ((d.covariance - sample_moments(x).covariance).norm(), 0.0);
}

TEST(TaperedCovariance, RingCutoffBeyondTwiceHalfLength) {
  oracle::Rng rng(4);
  const Ensemble ens(oracle::normal_matrix(rng, 40, 20));
  const auto m = tapered_covariance(ens, TaperSpec::gaspari_cohn(10.0, Topology::Ring));
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index k = 0; k < 40; ++k) {
      if (component_distance(i, k, 40, Topology::Ring) > 20.0) {
        EXPECT_EQ(m.covariance(i, k), 0.0);
      }
    }
  }
}

TEST(TaperedCovariance, PositiveSemidefiniteOnRandomInputs) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index q = 5 + static_cast<Eigen::Index>(rng() % 40);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 20);
    const Ensemble ens(oracle::normal_matrix(rng, q, n));
    // Distances on a line embed in R^1, where both tapers are valid
    // correlation functions, so the taper matrix itself is PSD.
    const double c = oracle::uniform(rng, 1.0, 10.0);
    const TaperSpec spec = trial % 2 == 0 ? TaperSpec::gaspari_cohn(c, Topology::Line)
                                          : TaperSpec::triangular(c, Topology::Line);
    const double taper_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(taper_matrix(spec, q))
                                 .eigenvalues()
                                 .minCoeff();
    ASSERT_GE(taper_min, -1e-10);
    const auto m = tapered_covariance(ens, spec);
    const double tr = m.covariance.trace();
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.covariance).eigenvalues().minCoeff();
    EXPECT_GE(lmin, -1e-8 * tr);
  }
}
