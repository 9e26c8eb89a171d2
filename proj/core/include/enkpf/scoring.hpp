#pragma once

#include <span>

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"

namespace enkpf {

/// Root mean square error of the ensemble mean against the truth.
double rmse(const Ensemble& ens, const Eigen::VectorXd& truth);
double rmse(const Eigen::MatrixXd& states, const Eigen::VectorXd& truth);

/// CRPS of the empirical distribution of `members` at `truth`:
/// (1/N) sum |x_j - X| - (1/(2N^2)) sum_j sum_k |x_j - x_k|, evaluated in
/// O(N log N) from the order statistics.
double crps(std::span<const double> members, double truth);

/// CRPS of component k (zero-based) of the ensemble.
double crps(const Eigen::MatrixXd& states, Eigen::Index k, double truth);

/// integral of |x''| (1 + x'^2)^{-3/2} ds over a periodic grid of spacing
/// `domain_length / n`, using central differences and the rectangle rule.
double curvature(const Eigen::VectorXd& x, double domain_length = 2.0);

}  // namespace enkpf
