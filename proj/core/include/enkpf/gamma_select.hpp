#pragma once

#include <vector>

#include <Eigen/Core>

#include "enkpf/enkpf.hpp"

namespace enkpf {

struct GammaSelection {
  double gamma = 1.0;
  std::vector<GammaProbe> trace;
};

/// Binary search over `policy.grid` for the smallest gamma whose diversity
/// criterion reaches the lower band edge, assuming the criterion increases
/// with gamma. At most `policy.max_probes` values are evaluated; gamma = 1 is
/// accepted without probing since the EnKF endpoint has uniform weights.
GammaSelection select_gamma(const Ensemble& ens,
                            const LinearGaussianObservation& obs,
                            const GammaPolicy& policy,
                            const MomentEstimate& forecast,
                            const RandomStreams& streams);

/// Diversity criterion of `mode` at one gamma: ESS or DIV of the mixture
/// weights, or the spread score.
double gamma_criterion(GammaMode mode, const Ensemble& ens,
                       const LinearGaussianObservation& obs, double gamma,
                       const MomentEstimate& forecast,
                       const RandomStreams& streams);

/// (1/q) sum_i min(1, sd_i(EnKPF) / sd_i(EnKF)) for updates that share their
/// noise substreams. Components where the EnKF spread is zero count as 1.
double spread_criterion(const Ensemble& ens,
                        const LinearGaussianObservation& obs, double gamma,
                        const MomentEstimate& forecast,
                        const RandomStreams& streams);
double spread_criterion(const Ensemble& ens,
                        const LinearGaussianObservation& obs, double gamma,
                        const TaperSpec& taper, const RandomStreams& streams);

/// N^2 Var of the approximate EnKPF weights for an iid N(mean, cov) forecast
/// sample, in closed form. `cov` must be positive definite.
double weight_variance_exact(const Eigen::MatrixXd& cov,
                             const Eigen::VectorXd& mean,
                             const LinearGaussianObservation& obs,
                             double gamma);

/// Leading (1 - gamma)^2 term of weight_variance_exact as gamma -> 1.
double weight_variance_asymptotic(const Eigen::MatrixXd& cov,
                                  const Eigen::VectorXd& mean,
                                  const LinearGaussianObservation& obs,
                                  double gamma);

/// ESS implied by a normalized weight variance: N / (1 + N^2 Var).
inline double approximate_ess(Eigen::Index n, double scaled_variance) {
  return static_cast<double>(n) / (1.0 + scaled_variance);
}

/// Exponent matrix C and linear term d such that the EnKPF weights satisfy
/// alpha_j ~ exp(-1/2 x' C x + d' x), x = x_j - mean.
struct WeightExponent {
  Eigen::MatrixXd c;
  Eigen::VectorXd d;
};
WeightExponent weight_exponent(const Eigen::MatrixXd& cov,
                               const Eigen::VectorXd& mean,
                               const LinearGaussianObservation& obs,
                               double gamma);

}  // namespace enkpf
