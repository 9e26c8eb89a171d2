#pragma once

#include <vector>

#include <Eigen/Core>

#include "enkpf/random.hpp"

namespace enkpf {

/// Nonnegative weights summing to one.
class WeightVector {
 public:
  /// Normalizes `weights`; throws DegenerateWeightsError if any entry is
  /// negative or non-finite, or if they sum to zero.
  explicit WeightVector(Eigen::VectorXd weights);

  /// Normalizes exp(log_weights) after subtracting the maximum. Entries of
  /// -inf get weight zero.
  static WeightVector from_log(const Eigen::VectorXd& log_weights);
  static WeightVector uniform(Eigen::Index n);

  [[nodiscard]] const Eigen::VectorXd& values() const { return w_; }
  [[nodiscard]] Eigen::Index size() const { return w_.size(); }
  [[nodiscard]] double operator[](Eigen::Index j) const { return w_[j]; }

 private:
  struct Normalized {};
  WeightVector(Normalized, Eigen::VectorXd w) : w_(std::move(w)) {}

  Eigen::VectorXd w_;
};

/// Effective sample size 1 / sum w_j^2, in [1, N].
double ess(const WeightVector& w);

/// sum_j min(1, N w_j): expected number of distinct components retained by
/// balanced resampling. In [1, N].
double div(const WeightVector& w);

/// Draws N indices so that component j appears either floor(N w_j) or
/// ceil(N w_j) times, with expectation N w_j. Deterministic floor allocation
/// followed by systematic sampling of the residuals. Indices are ascending.
std::vector<Eigen::Index> balanced_resample(const WeightVector& w,
                                            RandomStreams::Engine& engine);

}  // namespace enkpf
