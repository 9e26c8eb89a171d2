#pragma once

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/observation.hpp"
#include "enkpf/random.hpp"

namespace enkpf {

/// Perturbed-observation analysis with a given gain:
/// x_j + K (y - H x_j) + K eps_j, where eps_j is column j of `perturbations`.
Eigen::MatrixXd enkf_analysis(const Eigen::MatrixXd& states,
                              const LinearGaussianObservation& obs,
                              const Eigen::MatrixXd& gain,
                              const Eigen::MatrixXd& perturbations);

/// Stochastic EnKF update. The gain comes from the tapered sample covariance
/// and eps_j ~ N(0, R) is drawn from the `StageOneNoise` substream of member
/// j, the same stream the EnKPF uses for its first stage.
Ensemble enkf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                     const TaperSpec& taper, const RandomStreams& streams);

/// Variant taking an already estimated (and possibly tapered) forecast.
Ensemble enkf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                     const MomentEstimate& forecast,
                     const RandomStreams& streams);

}  // namespace enkpf
