#include "enkpf/static_prior.hpp"

#include <cmath>

#include "enkpf/enkpf.hpp"
#include "enkpf/error.hpp"
#include "enkpf/gamma_select.hpp"

namespace enkpf {

void StaticPriorSpec::validate() const {
  if (observation_case != 1 && observation_case != 2) {
    throw InvalidParameterError("observation_case must be 1 or 2");
  }
  if (q < 2 || q > base_dimension) {
    throw InvalidParameterError("static prior needs 2 <= q <= base_dimension");
  }
}

Eigen::MatrixXd static_base_sample(const RandomStreams& streams, Eigen::Index n,
                                   Eigen::Index base_dimension) {
  Eigen::MatrixXd z(base_dimension, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto engine = streams.engine(StreamRole::Scenario, static_cast<std::uint64_t>(j));
    z.col(j) = standard_normal(engine, base_dimension);
  }
  return z;
}

StaticScenario make_static_scenario(const StaticPriorSpec& spec,
                                    const Eigen::MatrixXd& base) {
  spec.validate();
  if (base.rows() < spec.q) {
    throw InvalidParameterError("base sample has fewer rows than q");
  }
  const Eigen::Index q = spec.q;
  const Eigen::Index n = base.cols();
  Eigen::MatrixXd x = base.topRows(q);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(q);
  double sigma = 0.5;
  if (spec.prior == PriorShape::Gaussian) {
    if (spec.observation_case == 2) {
      y[0] = 1.5;
      y[1] = 1.5;
    }
  } else {
    sigma = 3.0;
    // Members j > N/2 (one-based) form the shifted mode.
    for (Eigen::Index j = n / 2; j < n; ++j) x(0, j) += 6.0;
    y[0] = spec.observation_case == 1 ? -2.0 : 3.0;
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < q; ++i) all[static_cast<std::size_t>(i)] = i;
  return {Ensemble(std::move(x)),
          LinearGaussianObservation::diagonal(std::move(all), q, sigma * sigma,
                                              std::move(y))};
}

std::vector<double> SweepOptions::default_sweep_gammas() {
  std::vector<double> g;
  for (int k = 0; k <= 20; ++k) g.push_back(static_cast<double>(k) / 20.0);
  return g;
}

std::vector<SweepRow> diversity_sweep(const Eigen::MatrixXd& base,
                                      const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (const PriorShape prior : options.priors) {
    for (const int c : options.cases) {
      for (const Eigen::Index q : options.dims) {
        const StaticPriorSpec spec{prior, c, q, base.rows()};
        const StaticScenario sc = make_static_scenario(spec, base);
        const MomentEstimate tapered = tapered_covariance(sc.ensemble, options.taper);
        const MomentEstimate plugin =
            options.tapered_approximation ? tapered : sample_moments(sc.ensemble);
        const Eigen::Index n = sc.ensemble.size();
        for (const double g : options.gammas) {
          const MixtureUpdate mix = build_mixture(sc.ensemble, sc.obs, g, tapered);
          const double var = weight_variance_asymptotic(plugin.covariance,
                                                        plugin.mean, sc.obs, g);
          rows.push_back({prior, c, q, g, ess(mix.alpha) / static_cast<double>(n),
                          approximate_ess(n, var) / static_cast<double>(n)});
        }
      }
    }
  }
  return rows;
}

const char* to_string(PriorShape p) {
  return p == PriorShape::Gaussian ? "gaussian" : "bimodal";
}

}  // namespace enkpf
