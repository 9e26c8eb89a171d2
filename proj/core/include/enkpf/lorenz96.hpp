#pragma once

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/random.hpp"

namespace enkpf {

/// dX^k/dt = (X^{k+1} - X^{k-2}) X^{k-1} - X^k + F on a ring of q variables,
/// integrated with forward Euler.
struct Lorenz96Config {
  Eigen::Index q = 40;
  double forcing = 8.0;
  double dt = 0.001;
  double lead_time = 0.4;

  void validate() const;
};

Eigen::VectorXd lorenz96_drift(const Eigen::VectorXd& x, double forcing);

/// Advances a single state or every column of a matrix by `duration`, which
/// must be an integer multiple of cfg.dt. Throws DivergenceError on
/// non-finite states.
Eigen::VectorXd lorenz96_propagate(const Eigen::VectorXd& x,
                                   const Lorenz96Config& cfg, double duration);
Eigen::MatrixXd lorenz96_propagate(const Eigen::MatrixXd& states,
                                   const Lorenz96Config& cfg, double duration);
Ensemble lorenz96_propagate(const Ensemble& ens, const Lorenz96Config& cfg,
                            double duration);

/// N members drawn iid from N_q(0, I), column j from its own substream.
Ensemble lorenz96_initial(const RandomStreams& streams, Eigen::Index n,
                          Eigen::Index q = 40);
/// A truth state from the same law, on the `TruthInitial` substream.
Eigen::VectorXd lorenz96_truth(const RandomStreams& streams, Eigen::Index q = 40);

/// Number of whole steps of size dt in duration; throws if not an integer
/// multiple (relative tolerance 1e-9).
long step_count(double duration, double dt);

}  // namespace enkpf
