#include "enkpf/observation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "enkpf/error.hpp"

namespace enkpf {

ObservationOperator ObservationOperator::select(
    std::vector<Eigen::Index> components, Eigen::Index q) {
  if (q < 1) throw InvalidParameterError("state dimension must be >= 1");
  if (components.empty()) {
    throw InvalidParameterError("observation operator observes nothing");
  }
  for (const Eigen::Index c : components) {
    if (c < 0 || c >= q) {
      throw InvalidParameterError("observed component " + std::to_string(c) +
                                  " outside [0, " + std::to_string(q) + ")");
    }
  }
  ObservationOperator h;
  h.obs_dim_ = static_cast<Eigen::Index>(components.size());
  h.state_dim_ = q;
  h.components_ = std::move(components);
  return h;
}

ObservationOperator ObservationOperator::dense(Eigen::MatrixXd m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidParameterError("observation matrix must be non-empty");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() == 0.0).all()) {
      throw InvalidParameterError("observation matrix row " + std::to_string(i) +
                                  " is all zero");
    }
  }
  ObservationOperator h;
  h.obs_dim_ = m.rows();
  h.state_dim_ = m.cols();
  h.dense_ = std::move(m);
  return h;
}

Eigen::MatrixXd ObservationOperator::apply(const Eigen::MatrixXd& x) const {
  if (dense_) return *dense_ * x;
  Eigen::MatrixXd out(obs_dim_, x.cols());
  for (Eigen::Index i = 0; i < obs_dim_; ++i) out.row(i) = x.row(components_[i]);
  return out;
}

Eigen::MatrixXd ObservationOperator::right_transpose(
    const Eigen::MatrixXd& a) const {
  if (dense_) return a * dense_->transpose();
  Eigen::MatrixXd out(a.rows(), obs_dim_);
  for (Eigen::Index i = 0; i < obs_dim_; ++i) out.col(i) = a.col(components_[i]);
  return out;
}

Eigen::MatrixXd ObservationOperator::sandwich(const Eigen::MatrixXd& a) const {
  if (dense_) return *dense_ * a * dense_->transpose();
  Eigen::MatrixXd out(obs_dim_, obs_dim_);
  for (Eigen::Index k = 0; k < obs_dim_; ++k) {
    for (Eigen::Index i = 0; i < obs_dim_; ++i) {
      out(i, k) = a(components_[i], components_[k]);
    }
  }
  return out;
}

Eigen::MatrixXd ObservationOperator::transpose_apply(
    const Eigen::MatrixXd& b) const {
  if (dense_) return dense_->transpose() * b;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(state_dim_, b.cols());
  for (Eigen::Index i = 0; i < obs_dim_; ++i) out.row(components_[i]) += b.row(i);
  return out;
}

Eigen::MatrixXd ObservationOperator::to_dense() const {
  if (dense_) return *dense_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(obs_dim_, state_dim_);
  for (Eigen::Index i = 0; i < obs_dim_; ++i) h(i, components_[i]) = 1.0;
  return h;
}

LinearGaussianObservation::LinearGaussianObservation(ObservationOperator h,
                                                     Eigen::MatrixXd r,
                                                     Eigen::VectorXd y)
    : h_(std::move(h)), r_(std::move(r)), y_(std::move(y)) {
  const Eigen::Index m = h_.obs_dim();
  if (r_.rows() != m || r_.cols() != m) {
    throw InvalidParameterError("noise covariance must be " + std::to_string(m) +
                                "x" + std::to_string(m));
  }
  if (y_.size() != m) {
    throw InvalidParameterError("observation value has wrong length");
  }
  if (!r_.isApprox(r_.transpose(), 1e-12)) {
    throw InvalidParameterError("noise covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r_);
  if (llt.info() != Eigen::Success) {
    throw InvalidParameterError("noise covariance is not positive definite");
  }
  r_chol_ = llt.matrixL();
  r_log_det_ = 2.0 * r_chol_.diagonal().array().log().sum();
}

LinearGaussianObservation LinearGaussianObservation::diagonal(
    std::vector<Eigen::Index> components, Eigen::Index q, double variance,
    Eigen::VectorXd y) {
  if (!(variance > 0.0)) {
    throw InvalidParameterError("noise variance must be positive");
  }
  const auto m = static_cast<Eigen::Index>(components.size());
  return {ObservationOperator::select(std::move(components), q),
          Eigen::MatrixXd::Identity(m, m) * variance, std::move(y)};
}

LinearGaussianObservation LinearGaussianObservation::with_value(
    Eigen::VectorXd y) const {
  if (y.size() != obs_dim()) {
    throw InvalidParameterError("observation value has wrong length");
  }
  LinearGaussianObservation copy = *this;
  copy.y_ = std::move(y);
  return copy;
}

double log_likelihood(const Eigen::VectorXd& x,
                      const LinearGaussianObservation& obs, double temper) {
  if (!(temper > 0.0 && temper <= 1.0)) {
    throw InvalidParameterError("likelihood temper must lie in (0, 1]");
  }
  if (x.size() != obs.state_dim()) {
    throw InvalidParameterError("state has wrong dimension");
  }
  if (!x.allFinite()) throw InvalidParameterError("state is not finite");
  const Eigen::VectorXd innov = obs.value() - obs.op().apply(x);
  const Eigen::VectorXd z =
      obs.noise_chol().triangularView<Eigen::Lower>().solve(innov);
  const auto r = static_cast<double>(obs.obs_dim());
  const double log_det = obs.noise_log_det() - r * std::log(temper);
  return -0.5 * r * std::log(2.0 * std::numbers::pi) - 0.5 * log_det -
         0.5 * temper * z.squaredNorm();
}

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& p,
                            const LinearGaussianObservation& obs) {
  const Eigen::Index q = obs.state_dim();
  if (p.rows() != q || p.cols() != q) {
    throw InvalidParameterError("covariance does not match state dimension");
  }
  const Eigen::MatrixXd pht = obs.op().right_transpose(p);
  const Eigen::MatrixXd s = obs.op().sandwich(p) + obs.noise_cov();
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is not positive definite");
  }
  // K S = P H'  <=>  S K' = H P  (S symmetric)
  Eigen::MatrixXd k = llt.solve(pht.transpose()).transpose();
  if (!k.allFinite()) throw NumericalError("Kalman gain is not finite");
  return k;
}

Eigen::MatrixXd scaled_gain(const Eigen::MatrixXd& p,
                            const LinearGaussianObservation& obs, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidParameterError("gamma must lie in [0, 1]");
  }
  if (gamma == 0.0) return Eigen::MatrixXd::Zero(obs.state_dim(), obs.obs_dim());
  if (gamma == 1.0) return kalman_gain(p, obs);
  return kalman_gain(gamma * p, obs);
}

Eigen::MatrixXd observation_noise(const LinearGaussianObservation& obs,
                                  const RandomStreams& streams, StreamRole role,
                                  Eigen::Index n) {
  const Eigen::Index m = obs.obs_dim();
  Eigen::MatrixXd z(m, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    auto engine = streams.engine(role, static_cast<std::uint64_t>(j));
    z.col(j) = standard_normal(engine, m);
  }
  return obs.noise_chol().triangularView<Eigen::Lower>() * z;
}

}  // namespace enkpf
