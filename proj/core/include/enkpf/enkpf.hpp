#pragma once

#include <vector>

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/gamma_policy.hpp"
#include "enkpf/observation.hpp"
#include "enkpf/random.hpp"
#include "enkpf/resampling.hpp"

namespace enkpf {

/// Intermediate state of the two-stage update: the EnKF stage under the
/// likelihood tempered by gamma gives the equally weighted mixture
/// (1/N) sum_j N(nu_j, Q), which is reweighted by alpha for the remaining
/// exponent 1 - gamma.
struct MixtureUpdate {
  Eigen::MatrixXd nu;      // q x N stage-one means
  Eigen::MatrixXd q_cov;   // Q(gamma, P) = K(gamma P) R K(gamma P)' / gamma
  WeightVector alpha;      // mixture proportions
  double gamma = 0.0;
  Eigen::MatrixXd gain1;   // K(gamma P)
  Eigen::MatrixXd gain2;   // K((1 - gamma) Q)
};

/// The analysis mixture sum_j alpha_j N(mu_j, P^u).
struct PosteriorMixture {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd pu;
  WeightVector alpha;
};

/// Stage-one means, covariance Q and weights for a given gamma in [0, 1].
/// gamma = 0 and gamma = 1 are handled as exact branches: at 0, nu = x and
/// Q = 0 so alpha are the particle filter weights; at 1, alpha is uniform and
/// the second-stage gain is zero.
MixtureUpdate build_mixture(const Ensemble& ens,
                            const LinearGaussianObservation& obs, double gamma,
                            const MomentEstimate& forecast);
MixtureUpdate build_mixture(const Ensemble& ens,
                            const LinearGaussianObservation& obs, double gamma,
                            const TaperSpec& taper);

/// mu_j = nu_j + K((1-gamma) Q)(y - H nu_j),  P^u = (I - K((1-gamma) Q) H) Q.
PosteriorMixture posterior_mixture(const MixtureUpdate& mix,
                                   const LinearGaussianObservation& obs);

/// Draws one member per slot from the mixture given explicit resampled
/// indices and N(0, R) perturbations (r x N each). No square root of P^u is
/// formed: the stage-one noise goes through K(gamma P) / sqrt(gamma) and the
/// stage-two noise through a perturbed-observation step with R / (1-gamma).
Eigen::MatrixXd sample_mixture(const MixtureUpdate& mix,
                               const LinearGaussianObservation& obs,
                               const std::vector<Eigen::Index>& indices,
                               const Eigen::MatrixXd& eps1,
                               const Eigen::MatrixXd& eps2);

/// Balanced resampling of alpha from the `Resample` substream, then
/// sample_mixture with per-member `StageOneNoise` / `StageTwoNoise` draws.
Ensemble sample_update(const MixtureUpdate& mix,
                       const LinearGaussianObservation& obs,
                       const RandomStreams& streams);

struct GammaProbe {
  double gamma = 0.0;
  double criterion = 0.0;
};

struct EnkpfDiagnostics {
  double gamma = 0.0;
  double ess = 0.0;
  double div = 0.0;
  std::vector<GammaProbe> trace;
  /// Diversity of the chosen gamma lies above tau1 (adaptive modes only).
  bool above_band = false;
};

struct EnkpfResult {
  Ensemble ensemble;
  EnkpfDiagnostics diagnostics;
};

/// Full ensemble Kalman particle filter update: choose gamma, build the
/// mixture and sample from it.
EnkpfResult enkpf_update(const Ensemble& ens,
                         const LinearGaussianObservation& obs,
                         const GammaPolicy& policy,
                         const MomentEstimate& forecast,
                         const RandomStreams& streams);
EnkpfResult enkpf_update(const Ensemble& ens,
                         const LinearGaussianObservation& obs,
                         const GammaPolicy& policy, const TaperSpec& taper,
                         const RandomStreams& streams);

}  // namespace enkpf
