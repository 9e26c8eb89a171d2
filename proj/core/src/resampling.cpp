#include "enkpf/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "enkpf/error.hpp"

namespace enkpf {

WeightVector::WeightVector(Eigen::VectorXd weights) : w_(std::move(weights)) {
  if (w_.size() == 0) throw DegenerateWeightsError("empty weight vector");
  if (!w_.allFinite() || (w_.array() < 0.0).any()) {
    throw DegenerateWeightsError("weights must be finite and nonnegative");
  }
  const double total = w_.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateWeightsError("weights sum to zero");
  }
  w_ /= total;
}

WeightVector WeightVector::from_log(const Eigen::VectorXd& log_weights) {
  const Eigen::Index n = log_weights.size();
  if (n == 0) throw DegenerateWeightsError("empty weight vector");
  if (log_weights.array().isNaN().any()) {
    throw DegenerateWeightsError("log-weights contain NaN");
  }
  const double top = log_weights.maxCoeff();
  if (!std::isfinite(top)) {
    throw DegenerateWeightsError("all likelihoods are numerically zero");
  }
  Eigen::VectorXd w(n);
  double total = 0.0;
  // Fixed summation order keeps the normalizer independent of threading.
  for (Eigen::Index j = 0; j < n; ++j) {
    w[j] = std::exp(log_weights[j] - top);
    total += w[j];
  }
  w /= total;
  return {Normalized{}, std::move(w)};
}

WeightVector WeightVector::uniform(Eigen::Index n) {
  if (n < 1) throw DegenerateWeightsError("empty weight vector");
  return {Normalized{},
          Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

double ess(const WeightVector& w) {
  const double s = w.values().squaredNorm();
  if (!(s > 0.0)) throw DegenerateWeightsError("weights sum to zero");
  // Equal weights give exactly N rather than N up to rounding.
  if (w.values().minCoeff() == w.values().maxCoeff()) return static_cast<double>(w.size());
  return 1.0 / s;
}

double div(const WeightVector& w) {
  const auto n = static_cast<double>(w.size());
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) total += std::min(1.0, n * w[j]);
  return total;
}

std::vector<Eigen::Index> balanced_resample(const WeightVector& w,
                                            RandomStreams::Engine& engine) {
  const Eigen::Index n = w.size();
  const auto nd = static_cast<double>(n);

  std::vector<Eigen::Index> counts(static_cast<std::size_t>(n));
  Eigen::VectorXd residual(n);
  Eigen::Index allocated = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double expected = nd * w[j];
    double whole = std::floor(expected);
    double frac = expected - whole;
    // N w_j that should be an integer but landed just below one.
    if (frac > 1.0 - 1e-12) {
      whole += 1.0;
      frac = 0.0;
    } else if (frac < 1e-12) {
      frac = 0.0;
    }
    counts[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(whole);
    residual[j] = frac;
    allocated += counts[static_cast<std::size_t>(j)];
  }

  const Eigen::Index remaining = n - allocated;
  if (remaining < 0) {
    throw DegenerateWeightsError("resampling allocated too many copies");
  }
  if (remaining > 0) {
    const double total = residual.sum();
    if (!(total > 0.0)) {
      throw DegenerateWeightsError("resampling residuals vanish");
    }
    // Rescale so the residuals sum to exactly `remaining`.
    residual *= static_cast<double>(remaining) / total;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double offset = unif(engine);

    Eigen::Index drawn = 0;
    double cumulative = 0.0;
    std::vector<bool> extra(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < n && drawn < remaining; ++j) {
      cumulative += residual[j];
      if (offset + static_cast<double>(drawn) < cumulative) {
        extra[static_cast<std::size_t>(j)] = true;
        ++drawn;
      }
    }
    // Rounding can leave the last point just past the cumulative sum; give
    // the leftover slots to the largest residuals not yet chosen.
    while (drawn < remaining) {
      Eigen::Index best = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!extra[static_cast<std::size_t>(j)] && residual[j] > 0.0 &&
            (best < 0 || residual[j] > residual[best])) {
          best = j;
        }
      }
      if (best < 0) throw DegenerateWeightsError("resampling ran out of slots");
      extra[static_cast<std::size_t>(best)] = true;
      ++drawn;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (extra[static_cast<std::size_t>(j)]) ++counts[static_cast<std::size_t>(j)];
    }
  }

  std::vector<Eigen::Index> indices;
  indices.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    indices.insert(indices.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), j);
  }
  return indices;
}

}  // namespace enkpf
