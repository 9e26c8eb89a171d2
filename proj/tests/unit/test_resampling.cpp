#include <gtest/gtest.h>

#include <cmath>

#include "enkpf/error.hpp"
#include "enkpf/resampling.hpp"
#include "oracles.hpp"

using namespace enkpf;

namespace {

std::vector<long> counts(const std::vector<Eigen::Index>& idx, Eigen::Index n) {
  std::vector<long> c(static_cast<std::size_t>(n), 0);
  for (const auto i : idx) ++c[static_cast<std::size_t>(i)];
  return c;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(WeightVector, Normalizes) {
  const WeightVector w(vec({1.0, 3.0}));
  EXPECT_DOUBLE_EQ(w[0], 0.25);
  EXPECT_DOUBLE_EQ(w[1], 0.75);
}

TEST(WeightVector, RejectsDegenerate) {
  EXPECT_THROW(WeightVector(vec({0.0, 0.0})), DegenerateWeightsError);
  EXPECT_THROW(WeightVector(vec({1.0, -0.5})), DegenerateWeightsError);
  EXPECT_THROW(WeightVector(vec({1.0, std::nan("")})), DegenerateWeightsError);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(WeightVector::from_log(vec({-inf, -inf})), DegenerateWeightsError);
}

TEST(WeightVector, FromLogShiftInvariant) {
  oracle::Rng rng(1);
  const Eigen::VectorXd l = oracle::normal_matrix(rng, 20, 1).col(0) * 30.0;
  const auto a = WeightVector::from_log(l);
  const auto b = WeightVector::from_log(l.array() + 1234.5);
  EXPECT_LT((a.values() - b.values()).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_NEAR(a.values().sum(), 1.0, 1e-12);
  // Extreme spread must not underflow to an all-zero vector.
  const auto c = WeightVector::from_log(vec({-1e6, 0.0, -2e6}));
  EXPECT_EQ(c[1], 1.0);
}

TEST(Ess, Examples) {
  EXPECT_EQ(ess(WeightVector::uniform(50)), 50.0);
  EXPECT_EQ(ess(WeightVector(vec({1.0, 0.0, 0.0}))), 1.0);
  EXPECT_DOUBLE_EQ(ess(WeightVector(vec({0.5, 0.5, 0.0, 0.0}))), 2.0);
}

TEST(Div, Examples) {
  EXPECT_DOUBLE_EQ(div(WeightVector::uniform(13)), 13.0);
  EXPECT_EQ(div(WeightVector(vec({1.0, 0.0, 0.0}))), 1.0);
  EXPECT_DOUBLE_EQ(div(WeightVector(vec({0.5, 0.5, 0.0, 0.0}))), 2.0);
}

TEST(Diagnostics, RangesAndAbsoluteDeviationForm) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 60);
    Eigen::VectorXd p = oracle::random_simplex(rng, n);
    if (trial % 3 == 0) p = p.array().pow(8.0);  // sharpen
    const WeightVector w(p);
    const double e = ess(w);
    const double d = div(w);
    const auto nd = static_cast<double>(n);
    EXPECT_GE(e, 1.0 - 1e-12);
    EXPECT_LE(e, nd + 1e-9);
    EXPECT_GE(d, 1.0 - 1e-12);
    EXPECT_LE(d, nd + 1e-9);
    const double alt = nd * (1.0 - 0.5 * (w.values().array() - 1.0 / nd).abs().sum());
    EXPECT_NEAR(d, alt, 1e-9 * nd);
  }
}

TEST(BalancedResample, IntegerCountsAreExact) {
  auto eng = RandomStreams(3).engine(StreamRole::Resample);
  for (int rep = 0; rep < 100; ++rep) {
    EXPECT_EQ(counts(balanced_resample(WeightVector(vec({0.5, 0.5})), eng), 2),
              (std::vector<long>{1, 1}));
    EXPECT_EQ(counts(balanced_resample(WeightVector(vec({0.75, 0.25, 0.0, 0.0})), eng), 4),
              (std::vector<long>{3, 1, 0, 0}));
  }
}

TEST(BalancedResample, TenSlotsThreeComponents) {
  // Ten slots for (0.5, 0.3, 0.2): pad with zero weights so N = 10.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(10);
  w[0] = 0.5;
  w[1] = 0.3;
  w[2] = 0.2;
  auto eng = RandomStreams(4).engine(StreamRole::Resample);
  for (int rep = 0; rep < 100; ++rep) {
    const auto c = counts(balanced_resample(WeightVector(w), eng), 10);
    EXPECT_EQ(c[0], 5);
    EXPECT_EQ(c[1], 3);
    EXPECT_EQ(c[2], 2);
  }
}

TEST(BalancedResample, BalancedAndSortedOnRandomWeights) {
  oracle::Rng rng(5);
  auto eng = RandomStreams(5).engine(StreamRole::Resample);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 50);
    const WeightVector w(oracle::random_simplex(rng, n));
    const auto idx = balanced_resample(w, eng);
    ASSERT_EQ(static_cast<Eigen::Index>(idx.size()), n);
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    const auto c = counts(idx, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nw = static_cast<double>(n) * w[j];
      EXPECT_GE(c[static_cast<std::size_t>(j)], static_cast<long>(std::floor(nw - 1e-9)));
      EXPECT_LE(c[static_cast<std::size_t>(j)], static_cast<long>(std::ceil(nw + 1e-9)));
    }
  }
}

TEST(BalancedResample, Unbiased) {
  const Eigen::VectorXd p = vec({0.13, 0.27, 0.05, 0.31, 0.24});
  const WeightVector w(p);
  const int reps = 100000;
  auto eng = RandomStreams(6).engine(StreamRole::Resample);
  std::vector<oracle::RunningStats> stats(5);
  for (int r = 0; r < reps; ++r) {
    const auto c = counts(balanced_resample(w, eng), 5);
    for (int j = 0; j < 5; ++j) stats[j].add(static_cast<double>(c[j]));
  }
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(stats[j].mean, 5.0 * p[j], 3.0 * stats[j].std_error() + 1e-12) << j;
  }
}

TEST(BalancedResample, DivIsExpectedDistinctCount) {
  oracle::Rng rng(7);
  auto eng = RandomStreams(7).engine(StreamRole::Resample);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index n = 20;
    const WeightVector w(oracle::random_simplex(rng, n).array().pow(2.0).matrix());
    oracle::RunningStats s;
    for (int r = 0; r < 20000; ++r) {
      const auto c = counts(balanced_resample(w, eng), n);
      s.add(static_cast<double>(std::count_if(c.begin(), c.end(), [](long k) { return k > 0; })));
    }
    EXPECT_NEAR(s.mean, div(w), 3.0 * s.std_error() + 1e-9);
  }
}
