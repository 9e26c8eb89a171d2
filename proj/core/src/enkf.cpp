#include "enkpf/enkf.hpp"

#include "enkpf/error.hpp"

namespace enkpf {

Eigen::MatrixXd enkf_analysis(const Eigen::MatrixXd& states,
                              const LinearGaussianObservation& obs,
                              const Eigen::MatrixXd& gain,
                              const Eigen::MatrixXd& perturbations) {
  Eigen::MatrixXd innov = obs.op().apply(states);
  innov = (-innov).colwise() + obs.value();
  // Written as nu_j + K eps_j so that it coincides term by term with the
  // EnKPF stage one at gamma = 1.
  Eigen::MatrixXd out = states + gain * innov;
  out += gain * perturbations;
  return out;
}

Ensemble enkf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                     const MomentEstimate& forecast,
                     const RandomStreams& streams) {
  if (ens.dim() != obs.state_dim()) {
    throw InvalidParameterError("ensemble and observation dimensions differ");
  }
  const Eigen::MatrixXd gain = kalman_gain(forecast.covariance, obs);
  const Eigen::MatrixXd eps =
      observation_noise(obs, streams, StreamRole::StageOneNoise, ens.size());
  return Ensemble(enkf_analysis(ens.states(), obs, gain, eps));
}

Ensemble enkf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                     const TaperSpec& taper, const RandomStreams& streams) {
  return enkf_update(ens, obs, tapered_covariance(ens, taper), streams);
}

}  // namespace enkpf
