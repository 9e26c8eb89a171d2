#include "enkpf/lorenz96.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "enkpf/error.hpp"

namespace enkpf {

void Lorenz96Config::validate() const {
  if (q < 4) throw InvalidParameterError("Lorenz 96 needs q >= 4");
  if (!(dt > 0.0)) throw InvalidParameterError("Lorenz 96 dt must be positive");
  step_count(lead_time, dt);
}

long step_count(double duration, double dt) {
  if (!(duration >= 0.0) || !(dt > 0.0)) {
    throw InvalidParameterError("duration must be >= 0 and dt > 0");
  }
  const double ratio = duration / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidParameterError("duration is not a multiple of the time step");
  }
  return static_cast<long>(steps);
}

namespace {

inline void drift(const double* x, double* out, Eigen::Index q, double forcing) {
  for (Eigen::Index k = 0; k < q; ++k) {
    const Eigen::Index kp1 = k + 1 == q ? 0 : k + 1;
    const Eigen::Index km1 = k == 0 ? q - 1 : k - 1;
    const Eigen::Index km2 = k < 2 ? k + q - 2 : k - 2;
    out[k] = (x[kp1] - x[km2]) * x[km1] - x[k] + forcing;
  }
}

void euler_in_place(double* x, Eigen::Index q, double forcing, double dt,
                    long steps, std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(q));
  for (long s = 0; s < steps; ++s) {
    drift(x, scratch.data(), q, forcing);
    for (Eigen::Index k = 0; k < q; ++k) x[k] += dt * scratch[static_cast<std::size_t>(k)];
  }
}

}  // namespace

Eigen::VectorXd lorenz96_drift(const Eigen::VectorXd& x, double forcing) {
  if (x.size() < 4) throw InvalidParameterError("Lorenz 96 needs q >= 4");
  Eigen::VectorXd out(x.size());
  drift(x.data(), out.data(), x.size(), forcing);
  return out;
}

Eigen::MatrixXd lorenz96_propagate(const Eigen::MatrixXd& states,
                                   const Lorenz96Config& cfg, double duration) {
  if (states.rows() < 4) throw InvalidParameterError("Lorenz 96 needs q >= 4");
  const long steps = step_count(duration, cfg.dt);
  Eigen::MatrixXd out = states;
  const Eigen::Index q = out.rows();
  const Eigen::Index n = out.cols();
  bool finite = true;
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static) reduction(&& : finite)
    for (Eigen::Index j = 0; j < n; ++j) {
      double* col = out.col(j).data();
      euler_in_place(col, q, cfg.forcing, cfg.dt, steps, scratch);
      finite = finite && out.col(j).allFinite();
    }
  }
  if (!finite) throw DivergenceError("Lorenz 96 state became non-finite");
  return out;
}

Eigen::VectorXd lorenz96_propagate(const Eigen::VectorXd& x,
                                   const Lorenz96Config& cfg, double duration) {
  Eigen::MatrixXd m = x;
  return lorenz96_propagate(m, cfg, duration).col(0);
}

Ensemble lorenz96_propagate(const Ensemble& ens, const Lorenz96Config& cfg,
                            double duration) {
  return Ensemble(lorenz96_propagate(ens.states(), cfg, duration));
}

Ensemble lorenz96_initial(const RandomStreams& streams, Eigen::Index n,
                          Eigen::Index q) {
  Eigen::MatrixXd x(q, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto engine = streams.engine(StreamRole::EnsembleInitial,
                                 static_cast<std::uint64_t>(j));
    x.col(j) = standard_normal(engine, q);
  }
  return Ensemble(std::move(x));
}

Eigen::VectorXd lorenz96_truth(const RandomStreams& streams, Eigen::Index q) {
  auto engine = streams.engine(StreamRole::TruthInitial);
  return standard_normal(engine, q);
}

}  // namespace enkpf
