#include "enkpf/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "enkpf/error.hpp"

namespace enkpf {

double rmse(const Eigen::MatrixXd& states, const Eigen::VectorXd& truth) {
  if (states.rows() != truth.size()) {
    throw InvalidParameterError("truth does not match state dimension");
  }
  if (states.cols() < 1) throw InvalidParameterError("empty ensemble");
  const Eigen::VectorXd err = states.rowwise().mean() - truth;
  return std::sqrt(err.squaredNorm() / static_cast<double>(truth.size()));
}

double rmse(const Ensemble& ens, const Eigen::VectorXd& truth) {
  return rmse(ens.states(), truth);
}

double crps(std::span<const double> members, double truth) {
  const std::size_t n = members.size();
  if (n == 0) throw InvalidParameterError("CRPS needs at least one member");
  std::vector<double> x(members.begin(), members.end());
  std::sort(x.begin(), x.end());

  double abs_err = 0.0;
  // sum_j sum_k |x_j - x_k| = 2 sum_i (2i - n - 1) x_(i), i = 1..n. The
  // coefficients sum to zero, so x_(1) can be subtracted to avoid cancellation.
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    abs_err += std::abs(x[i] - truth);
    spread += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * (x[i] - x[0]);
  }
  const auto nd = static_cast<double>(n);
  // Clamp rounding noise; the score is nonnegative.
  return std::max(0.0, abs_err / nd - spread / (nd * nd));
}

double crps(const Eigen::MatrixXd& states, Eigen::Index k, double truth) {
  if (k < 0 || k >= states.rows()) {
    throw InvalidParameterError("CRPS component out of range");
  }
  const Eigen::VectorXd row = states.row(k).transpose();
  return crps(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
              truth);
}

double curvature(const Eigen::VectorXd& x, double domain_length) {
  const Eigen::Index n = x.size();
  if (n < 3) throw InvalidParameterError("curvature needs at least 3 points");
  const double h = domain_length / static_cast<double>(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prev = x[(i + n - 1) % n];
    const double next = x[(i + 1) % n];
    const double d1 = (next - prev) / (2.0 * h);
    const double d2 = (next - 2.0 * x[i] + prev) / (h * h);
    total += std::abs(d2) * std::pow(1.0 + d1 * d1, -1.5);
  }
  return total * h;
}

}  // namespace enkpf
