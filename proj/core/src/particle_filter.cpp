#include "enkpf/particle_filter.hpp"

#include "enkpf/error.hpp"

namespace enkpf {

Eigen::VectorXd log_weights(const Eigen::MatrixXd& states,
                            const LinearGaussianObservation& obs) {
  Eigen::MatrixXd innov = obs.op().apply(states);
  innov = (-innov).colwise() + obs.value();
  obs.noise_chol().triangularView<Eigen::Lower>().solveInPlace(innov);
  return -0.5 * innov.colwise().squaredNorm().transpose();
}

PfResult pf_update(const Ensemble& ens, const LinearGaussianObservation& obs,
                   const RandomStreams& streams) {
  if (ens.dim() != obs.state_dim()) {
    throw InvalidParameterError("ensemble and observation dimensions differ");
  }
  WeightVector w = WeightVector::from_log(log_weights(ens.states(), obs));
  auto engine = streams.engine(StreamRole::Resample);
  const auto idx = balanced_resample(w, engine);

  Eigen::MatrixXd out(ens.dim(), ens.size());
  for (Eigen::Index j = 0; j < ens.size(); ++j) {
    out.col(j) = ens.member(idx[static_cast<std::size_t>(j)]);
  }
  const WeightDiagnostics diag{ess(w), div(w)};
  return {Ensemble(std::move(out)), std::move(w), diag};
}

}  // namespace enkpf
