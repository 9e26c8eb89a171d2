#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/observation.hpp"
#include "enkpf/random.hpp"

namespace enkpf {

enum class PriorShape { Gaussian, Bimodal };

/// Single-update test case: H = I, R = sigma^2 I, forecast built from a
/// standard normal base sample.
///   Gaussian: sigma = 0.5, y1 = 0, y2 = (1.5, 1.5, 0, ...).
///   Bimodal:  sigma = 3, members j > N/2 shifted by (6, 0, ...),
///             y1 = (-2, 0, ...), y2 = (3, 0, ...).
struct StaticPriorSpec {
  PriorShape prior = PriorShape::Gaussian;
  int observation_case = 1;  // 1 or 2
  Eigen::Index q = 10;
  Eigen::Index base_dimension = 250;

  void validate() const;
};

struct StaticScenario {
  Ensemble ensemble;
  LinearGaussianObservation obs;
};

/// base_dimension x N standard normal sample; column j from its own
/// `Scenario` substream. All dimensions q use the first q rows of it.
Eigen::MatrixXd static_base_sample(const RandomStreams& streams, Eigen::Index n,
                                   Eigen::Index base_dimension = 250);

StaticScenario make_static_scenario(const StaticPriorSpec& spec,
                                    const Eigen::MatrixXd& base);

struct SweepRow {
  PriorShape prior = PriorShape::Gaussian;
  int observation_case = 1;
  Eigen::Index q = 0;
  double gamma = 0.0;
  double ess_frac = 0.0;
  /// N^{-1} ESS predicted from the (1 - gamma)^2 weight-variance asymptotics
  /// with the sample mean and the (tapered) sample covariance plugged in.
  double ess_frac_approx = 0.0;
};

struct SweepOptions {
  std::vector<PriorShape> priors{PriorShape::Gaussian, PriorShape::Bimodal};
  std::vector<int> cases{1, 2};
  std::vector<Eigen::Index> dims{10, 50, 250};
  std::vector<double> gammas = default_sweep_gammas();
  TaperSpec taper = TaperSpec::triangular(10.0, Topology::Line);
  /// Plug the tapered (true) or raw (false) sample covariance into the
  /// asymptotic approximation.
  bool tapered_approximation = true;

  /// {0, 0.05, ..., 1}.
  static std::vector<double> default_sweep_gammas();
};

std::vector<SweepRow> diversity_sweep(const Eigen::MatrixXd& base,
                                      const SweepOptions& options);

const char* to_string(PriorShape p);

}  // namespace enkpf
