#pragma once

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "enkpf/random.hpp"

namespace enkpf {

/// Linear observation operator H (r x q). Stored either as a list of observed
/// state components (each row of H is a unit vector) or as a dense matrix.
class ObservationOperator {
 public:
  /// Selection form; `components` are zero-based and must lie in [0, q).
  static ObservationOperator select(std::vector<Eigen::Index> components,
                                    Eigen::Index q);
  /// Dense form; rows that are entirely zero are rejected.
  static ObservationOperator dense(Eigen::MatrixXd h);

  [[nodiscard]] Eigen::Index obs_dim() const { return obs_dim_; }
  [[nodiscard]] Eigen::Index state_dim() const { return state_dim_; }
  [[nodiscard]] bool is_selection() const { return !dense_.has_value(); }
  [[nodiscard]] const std::vector<Eigen::Index>& components() const {
    return components_;
  }

  /// H x for a vector or H X column by column.
  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// A H' for any A with q columns.
  [[nodiscard]] Eigen::MatrixXd right_transpose(const Eigen::MatrixXd& a) const;
  /// H A H' for a q x q matrix A.
  [[nodiscard]] Eigen::MatrixXd sandwich(const Eigen::MatrixXd& a) const;
  /// H' B for any B with r rows.
  [[nodiscard]] Eigen::MatrixXd transpose_apply(const Eigen::MatrixXd& b) const;
  [[nodiscard]] Eigen::MatrixXd to_dense() const;

 private:
  ObservationOperator() = default;

  std::vector<Eigen::Index> components_;
  std::optional<Eigen::MatrixXd> dense_;
  Eigen::Index obs_dim_ = 0;
  Eigen::Index state_dim_ = 0;
};

/// y = H x + eps, eps ~ N(0, R).
class LinearGaussianObservation {
 public:
  /// Throws InvalidParameterError on dimension mismatch or if R is not
  /// symmetric positive definite.
  LinearGaussianObservation(ObservationOperator h, Eigen::MatrixXd r,
                            Eigen::VectorXd y);

  /// Independent observations of `components` with common noise variance.
  static LinearGaussianObservation diagonal(std::vector<Eigen::Index> components,
                                            Eigen::Index q, double variance,
                                            Eigen::VectorXd y);

  [[nodiscard]] const ObservationOperator& op() const { return h_; }
  [[nodiscard]] const Eigen::MatrixXd& noise_cov() const { return r_; }
  [[nodiscard]] const Eigen::VectorXd& value() const { return y_; }
  [[nodiscard]] Eigen::Index obs_dim() const { return h_.obs_dim(); }
  [[nodiscard]] Eigen::Index state_dim() const { return h_.state_dim(); }

  /// Lower Cholesky factor of R.
  [[nodiscard]] const Eigen::MatrixXd& noise_chol() const { return r_chol_; }
  [[nodiscard]] double noise_log_det() const { return r_log_det_; }

  /// Same operator and noise, different realized value.
  [[nodiscard]] LinearGaussianObservation with_value(Eigen::VectorXd y) const;

 private:
  ObservationOperator h_;
  Eigen::MatrixXd r_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd r_chol_;
  double r_log_det_ = 0.0;
};

/// log phi(y; Hx, R / temper), including the normalizing constant.
double log_likelihood(const Eigen::VectorXd& x,
                      const LinearGaussianObservation& obs,
                      double temper = 1.0);

/// K(P) = P H' (H P H' + R)^{-1}, via a Cholesky solve of the innovation
/// covariance.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& p,
                            const LinearGaussianObservation& obs);

/// K(gamma P). Returns the zero matrix at gamma = 0 without factorizing.
Eigen::MatrixXd scaled_gain(const Eigen::MatrixXd& p,
                            const LinearGaussianObservation& obs, double gamma);

/// r x n matrix of independent N(0, R) draws, column j from its own substream.
Eigen::MatrixXd observation_noise(const LinearGaussianObservation& obs,
                                  const RandomStreams& streams, StreamRole role,
                                  Eigen::Index n);

}  // namespace enkpf
