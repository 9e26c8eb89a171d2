#pragma once

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/observation.hpp"
#include "enkpf/random.hpp"
#include "enkpf/resampling.hpp"

namespace enkpf {

struct WeightDiagnostics {
  double ess = 0.0;
  double div = 0.0;
};

struct PfResult {
  Ensemble ensemble;
  WeightVector weights;
  WeightDiagnostics diagnostics;
};

/// Unnormalized log-likelihoods -1/2 |L^{-1}(y - H x_j)|^2 for every column,
/// where L L' = R. Constant terms are dropped.
Eigen::VectorXd log_weights(const Eigen::MatrixXd& states,
                            const LinearGaussianObservation& obs);

/// Bootstrap particle filter: weight by the likelihood, then balanced
/// resampling driven by the `Resample` substream.
PfResult pf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                   const RandomStreams& streams);

}  // namespace enkpf
