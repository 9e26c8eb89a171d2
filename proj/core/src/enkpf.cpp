#include "enkpf/enkpf.hpp"

#include <cmath>

#include "enkpf/error.hpp"
#include "enkpf/gamma_select.hpp"
#include "enkpf/particle_filter.hpp"

namespace enkpf {
namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidParameterError("gamma must lie in [0, 1], got " +
                                std::to_string(gamma));
  }
}

Eigen::MatrixXd innovations(const Eigen::MatrixXd& states,
                            const LinearGaussianObservation& obs) {
  Eigen::MatrixXd d = obs.op().apply(states);
  return (-d).colwise() + obs.value();
}

}  // namespace

MixtureUpdate build_mixture(const Ensemble& ens,
                            const LinearGaussianObservation& obs, double gamma,
                            const MomentEstimate& forecast) {
  check_gamma(gamma);
  if (ens.dim() != obs.state_dim()) {
    throw InvalidParameterError("ensemble and observation dimensions differ");
  }
  const Eigen::Index q = ens.dim();
  const Eigen::Index n = ens.size();

  if (gamma == 0.0) {
    return MixtureUpdate{
        ens.states(),
        Eigen::MatrixXd::Zero(q, q),
        WeightVector::from_log(log_weights(ens.states(), obs)),
        0.0,
        Eigen::MatrixXd::Zero(q, obs.obs_dim()),
        Eigen::MatrixXd::Zero(q, obs.obs_dim()),
    };
  }

  Eigen::MatrixXd gain1 = scaled_gain(forecast.covariance, obs, gamma);
  Eigen::MatrixXd nu = ens.states() + gain1 * innovations(ens.states(), obs);
  Eigen::MatrixXd q_cov = gain1 * obs.noise_cov() * gain1.transpose() / gamma;
  q_cov = 0.5 * (q_cov + q_cov.transpose()).eval();

  if (gamma == 1.0) {
    return MixtureUpdate{std::move(nu),
                         std::move(q_cov),
                         WeightVector::uniform(n),
                         1.0,
                         std::move(gain1),
                         Eigen::MatrixXd::Zero(q, obs.obs_dim())};
  }

  // alpha_j ~ phi(y; H nu_j, H Q H' + R / (1 - gamma))
  const Eigen::MatrixXd s =
      obs.op().sandwich(q_cov) + obs.noise_cov() / (1.0 - gamma);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mixture weight covariance is not positive definite");
  }
  Eigen::MatrixXd z = innovations(nu, obs);
  llt.matrixL().solveInPlace(z);
  const Eigen::VectorXd logw = -0.5 * z.colwise().squaredNorm().transpose();

  Eigen::MatrixXd gain2 = scaled_gain(q_cov, obs, 1.0 - gamma);
  return MixtureUpdate{std::move(nu),           std::move(q_cov),
                       WeightVector::from_log(logw), gamma,
                       std::move(gain1),        std::move(gain2)};
}

MixtureUpdate build_mixture(const Ensemble& ens,
                            const LinearGaussianObservation& obs, double gamma,
                            const TaperSpec& taper) {
  return build_mixture(ens, obs, gamma, tapered_covariance(ens, taper));
}

PosteriorMixture posterior_mixture(const MixtureUpdate& mix,
                                   const LinearGaussianObservation& obs) {
  Eigen::MatrixXd mu = mix.nu + mix.gain2 * innovations(mix.nu, obs);
  Eigen::MatrixXd pu = mix.q_cov - mix.gain2 * obs.op().apply(mix.q_cov);
  pu = 0.5 * (pu + pu.transpose()).eval();
  return {std::move(mu), std::move(pu), mix.alpha};
}

Eigen::MatrixXd sample_mixture(const MixtureUpdate& mix,
                               const LinearGaussianObservation& obs,
                               const std::vector<Eigen::Index>& indices,
                               const Eigen::MatrixXd& eps1,
                               const Eigen::MatrixXd& eps2) {
  const Eigen::Index q = mix.nu.rows();
  const auto n = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index r = obs.obs_dim();
  if (eps1.rows() != r || eps1.cols() != n || eps2.rows() != r ||
      eps2.cols() != n) {
    throw InvalidParameterError("perturbation matrices have wrong shape");
  }

  Eigen::MatrixXd x(q, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = indices[static_cast<std::size_t>(j)];
    if (src < 0 || src >= mix.nu.cols()) {
      throw InvalidParameterError("resampled index out of range");
    }
    x.col(j) = mix.nu.col(src);
  }

  if (mix.gamma > 0.0) {
    Eigen::MatrixXd stage1 = mix.gain1 * eps1;
    if (mix.gamma != 1.0) stage1 /= std::sqrt(mix.gamma);
    x += stage1;
  }
  if (mix.gamma < 1.0 && mix.gamma > 0.0) {
    // x + K2 (y + eps2 / sqrt(1 - gamma) - H x)
    Eigen::MatrixXd target = eps2 / std::sqrt(1.0 - mix.gamma);
    target.colwise() += obs.value();
    target -= obs.op().apply(x);
    x += mix.gain2 * target;
  }
  return x;
}

Ensemble sample_update(const MixtureUpdate& mix,
                       const LinearGaussianObservation& obs,
                       const RandomStreams& streams) {
  const Eigen::Index n = mix.nu.cols();
  auto engine = streams.engine(StreamRole::Resample);
  const auto indices = balanced_resample(mix.alpha, engine);

  const Eigen::Index r = obs.obs_dim();
  const Eigen::MatrixXd eps1 =
      mix.gamma > 0.0
          ? observation_noise(obs, streams, StreamRole::StageOneNoise, n)
          : Eigen::MatrixXd::Zero(r, n);
  const Eigen::MatrixXd eps2 =
      (mix.gamma > 0.0 && mix.gamma < 1.0)
          ? observation_noise(obs, streams, StreamRole::StageTwoNoise, n)
          : Eigen::MatrixXd::Zero(r, n);
  return Ensemble(sample_mixture(mix, obs, indices, eps1, eps2));
}

EnkpfResult enkpf_update(const Ensemble& ens,
                         const LinearGaussianObservation& obs,
                         const GammaPolicy& policy,
                         const MomentEstimate& forecast,
                         const RandomStreams& streams) {
  policy.validate();
  EnkpfDiagnostics diag;
  double gamma = policy.gamma;
  if (policy.mode != GammaMode::Fixed) {
    GammaSelection sel = select_gamma(ens, obs, policy, forecast, streams);
    gamma = sel.gamma;
    diag.trace = std::move(sel.trace);
  }

  const MixtureUpdate mix = build_mixture(ens, obs, gamma, forecast);
  diag.gamma = gamma;
  diag.ess = ess(mix.alpha);
  diag.div = div(mix.alpha);
  if (policy.mode == GammaMode::AdaptiveEss || policy.mode == GammaMode::AdaptiveDiv) {
    const double crit = policy.mode == GammaMode::AdaptiveEss ? diag.ess : diag.div;
    diag.above_band = crit > policy.tau1 * static_cast<double>(ens.size());
  }
  return {sample_update(mix, obs, streams), std::move(diag)};
}

EnkpfResult enkpf_update(const Ensemble& ens,
                         const LinearGaussianObservation& obs,
                         const GammaPolicy& policy, const TaperSpec& taper,
                         const RandomStreams& streams) {
  return enkpf_update(ens, obs, policy, tapered_covariance(ens, taper), streams);
}

}  // namespace enkpf
