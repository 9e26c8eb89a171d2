#pragma once

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"

namespace enkpf {

/// d_t x + d_s^3 x + 3 d_s (x^2) = 0 on the periodic domain [-1, 1).
struct KdVConfig {
  Eigen::Index grid_points = 128;
  double internal_dt = 1e-4;
  double lead_time = 0.01;
  bool dealias = true;

  void validate() const;
};

/// Grid coordinate s_i = -1 + 2 i / grid_points.
Eigen::VectorXd kdv_grid(Eigen::Index grid_points);

/// Strang split-step pseudospectral integrator. Each internal step applies
/// half of the exact linear phase, one classical RK4 step of the nonlinear
/// term (2/3-rule dealiased) and the other half of the linear phase.
/// With dealiasing on, the state is projected onto the retained modes
/// before the first step.
Eigen::VectorXd kdv_propagate(const Eigen::VectorXd& x, const KdVConfig& cfg,
                              double duration);
Eigen::MatrixXd kdv_propagate(const Eigen::MatrixXd& states,
                              const KdVConfig& cfg, double duration);
Ensemble kdv_propagate(const Ensemble& ens, const KdVConfig& cfg,
                       double duration);

/// exp(-s^2 / eta^2) sampled on the grid.
Eigen::VectorXd kdv_bump(double eta, Eigen::Index grid_points = 128);

/// Quasi-random prior ensemble: member j uses
/// log eta_j = log 0.05 + ((j + 1/2) / N) (log 0.3 - log 0.05).
Ensemble kdv_initial(Eigen::Index n, Eigen::Index grid_points = 128);
Eigen::VectorXd kdv_initial_etas(Eigen::Index n);

/// Truth initial condition (eta = 0.2).
Eigen::VectorXd kdv_truth(Eigen::Index grid_points = 128);

/// Largest retained wavenumber index under the 2/3 rule.
Eigen::Index kdv_dealias_cutoff(Eigen::Index grid_points);

}  // namespace enkpf
