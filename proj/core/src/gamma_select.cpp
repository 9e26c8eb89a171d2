#include "enkpf/gamma_select.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "enkpf/enkf.hpp"
#include "enkpf/error.hpp"

namespace enkpf {

GammaPolicy GammaPolicy::fixed(double gamma) {
  GammaPolicy p;
  p.mode = GammaMode::Fixed;
  p.gamma = gamma;
  return p;
}

GammaPolicy GammaPolicy::adaptive(GammaMode mode, double tau0, double tau1) {
  GammaPolicy p;
  p.mode = mode;
  p.tau0 = tau0;
  p.tau1 = tau1;
  return p;
}

std::vector<double> GammaPolicy::default_grid(int steps) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) / steps);
  return grid;
}

void GammaPolicy::validate() const {
  if (mode == GammaMode::Fixed) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
      throw InvalidParameterError("fixed gamma must lie in [0, 1]");
    }
    return;
  }
  if (!(tau0 >= 0.0 && tau0 <= tau1 && tau1 <= 1.0)) {
    throw InvalidParameterError("diversity band must satisfy 0 <= tau0 <= tau1 <= 1");
  }
  if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0 ||
      !std::is_sorted(grid.begin(), grid.end())) {
    throw InvalidParameterError("gamma grid must be ascending from 0 to 1");
  }
  if (max_probes < 1) throw InvalidParameterError("max_probes must be >= 1");
}

double spread_criterion(const Ensemble& ens,
                        const LinearGaussianObservation& obs, double gamma,
                        const MomentEstimate& forecast,
                        const RandomStreams& streams) {
  const Ensemble bridged =
      sample_update(build_mixture(ens, obs, gamma, forecast), obs, streams);
  const Ensemble kalman = enkf_update(ens, obs, forecast, streams);

  const auto sd = [](const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd a = x.colwise() - x.rowwise().mean();
    return (a.rowwise().squaredNorm() / static_cast<double>(x.cols() - 1))
        .array()
        .sqrt()
        .eval();
  };
  const Eigen::ArrayXd sd_bridge = sd(bridged.states());
  const Eigen::ArrayXd sd_kalman = sd(kalman.states());

  double score = 0.0;
  for (Eigen::Index i = 0; i < sd_kalman.size(); ++i) {
    score += sd_kalman[i] > 0.0 ? std::min(1.0, sd_bridge[i] / sd_kalman[i]) : 1.0;
  }
  return score / static_cast<double>(sd_kalman.size());
}

double spread_criterion(const Ensemble& ens,
                        const LinearGaussianObservation& obs, double gamma,
                        const TaperSpec& taper, const RandomStreams& streams) {
  return spread_criterion(ens, obs, gamma, tapered_covariance(ens, taper),
                          streams);
}

double gamma_criterion(GammaMode mode, const Ensemble& ens,
                       const LinearGaussianObservation& obs, double gamma,
                       const MomentEstimate& forecast,
                       const RandomStreams& streams) {
  switch (mode) {
    case GammaMode::AdaptiveEss:
      return ess(build_mixture(ens, obs, gamma, forecast).alpha);
    case GammaMode::AdaptiveDiv:
      return div(build_mixture(ens, obs, gamma, forecast).alpha);
    case GammaMode::AdaptiveSpread:
      return spread_criterion(ens, obs, gamma, forecast, streams);
    case GammaMode::Fixed:
      break;
  }
  throw InvalidParameterError("fixed gamma policy has no criterion");
}

GammaSelection select_gamma(const Ensemble& ens,
                            const LinearGaussianObservation& obs,
                            const GammaPolicy& policy,
                            const MomentEstimate& forecast,
                            const RandomStreams& streams) {
  policy.validate();
  if (policy.mode == GammaMode::Fixed) {
    throw InvalidParameterError("select_gamma requires an adaptive policy");
  }
  const double threshold = policy.mode == GammaMode::AdaptiveSpread
                               ? policy.tau0
                               : policy.tau0 * static_cast<double>(ens.size());

  GammaSelection sel;
  // Invariant: grid[hi] qualifies (the last grid value is gamma = 1); the
  // answer lies in [lo, hi].
  std::size_t lo = 0;
  std::size_t hi = policy.grid.size() - 1;
  int probes = 0;
  while (lo < hi && probes < policy.max_probes) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double g = policy.grid[mid];
    const double crit =
        gamma_criterion(policy.mode, ens, obs, g, forecast, streams);
    sel.trace.push_back({g, crit});
    ++probes;
    if (crit >= threshold) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  sel.gamma = policy.grid[hi];
  return sel;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_covariance(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    throw InvalidParameterError("forecast covariance must be positive definite");
  }
  return llt;
}

double log_det_spd(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite");
  }
  return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace

WeightExponent weight_exponent(const Eigen::MatrixXd& cov,
                               const Eigen::VectorXd& mean,
                               const LinearGaussianObservation& obs,
                               double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidParameterError("gamma must lie in [0, 1]");
  }
  const auto& h = obs.op();
  const Eigen::Index r = obs.obs_dim();
  const Eigen::MatrixXd k = scaled_gain(cov, obs, gamma);
  Eigen::MatrixXd q_cov = Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
  if (gamma > 0.0) q_cov = k * obs.noise_cov() * k.transpose() / gamma;

  const Eigen::MatrixXd a = (1.0 - gamma) * h.sandwich(q_cov) + obs.noise_cov();
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(r, r) - h.apply(k);
  const Eigen::MatrixXd g = b.transpose() * a.llt().solve(b);
  const Eigen::MatrixXd ht_g = h.transpose_apply(g);  // q x r

  WeightExponent out;
  out.c = (1.0 - gamma) * h.transpose_apply(ht_g.transpose()).transpose();
  out.c = 0.5 * (out.c + out.c.transpose()).eval();
  out.d = (1.0 - gamma) * ht_g * (obs.value() - h.apply(mean));
  return out;
}

double weight_variance_exact(const Eigen::MatrixXd& cov,
                             const Eigen::VectorXd& mean,
                             const LinearGaussianObservation& obs,
                             double gamma) {
  const auto llt = factor_covariance(cov);
  const WeightExponent ex = weight_exponent(cov, mean, obs, gamma);

  // With P = L L' and M = L' C L:
  //   det(P C + I) = det(I + M),
  //   (C + P^{-1} / s)^{-1} = L (M + I / s)^{-1} L'.
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd m = l.transpose() * ex.c * l;
  m = 0.5 * (m + m.transpose()).eval();
  const Eigen::Index q = m.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
  const Eigen::VectorXd u = l.transpose() * ex.d;

  const double quad_half = u.dot((m + 0.5 * eye).llt().solve(u));
  const double quad_one = u.dot((m + eye).llt().solve(u));
  const double log_ratio =
      log_det_spd(eye + m) - 0.5 * log_det_spd(eye + 2.0 * m) + quad_half - quad_one;
  return std::expm1(log_ratio);
}

double weight_variance_asymptotic(const Eigen::MatrixXd& cov,
                                  const Eigen::VectorXd& mean,
                                  const LinearGaussianObservation& obs,
                                  double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidParameterError("gamma must lie in [0, 1]");
  }
  const auto& h = obs.op();
  const Eigen::Index r = obs.obs_dim();
  const Eigen::MatrixXd k1 = kalman_gain(cov, obs);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(r, r) - h.apply(k1);
  const Eigen::MatrixXd w =
      b.transpose() * obs.noise_cov().llt().solve(b);  // (I-K'H') R^-1 (I-HK)
  const Eigen::MatrixXd s = h.sandwich(cov);
  const Eigen::MatrixXd m = w * s * w;
  const Eigen::VectorXd e = obs.value() - h.apply(mean);
  const double one_minus = 1.0 - gamma;
  return one_minus * one_minus * (0.5 * (s * m).trace() + e.dot(m * e));
}

}  // namespace enkpf
