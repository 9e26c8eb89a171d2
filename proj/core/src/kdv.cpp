#include "enkpf/kdv.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "enkpf/error.hpp"
#include "enkpf/lorenz96.hpp"

namespace enkpf {

void KdVConfig::validate() const {
  if (grid_points < 8 || (grid_points & (grid_points - 1)) != 0) {
    throw InvalidParameterError("KdV grid_points must be a power of two >= 8");
  }
  if (!(internal_dt > 0.0)) {
    throw InvalidParameterError("KdV internal_dt must be positive");
  }
  step_count(lead_time, internal_dt);
}

Eigen::VectorXd kdv_grid(Eigen::Index grid_points) {
  Eigen::VectorXd s(grid_points);
  for (Eigen::Index i = 0; i < grid_points; ++i) {
    s[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_points);
  }
  return s;
}

Eigen::Index kdv_dealias_cutoff(Eigen::Index grid_points) {
  // Keep |m| < n/3; the quadratic term then aliases only into discarded modes.
  return (grid_points - 1) / 3;
}

namespace {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// Integrates one member in place. Holds its own FFT object, so separate
// instances may run concurrently.
class SplitStepSolver {
 public:
  SplitStepSolver(Eigen::Index n, const KdVConfig& cfg)
      : n_(n),
        half_bins_(n / 2 + 1),
        cutoff_(cfg.dealias ? kdv_dealias_cutoff(n) : n / 2),
        dt_(cfg.internal_dt),
        wavenumber_(static_cast<std::size_t>(half_bins_)),
        half_phase_(static_cast<std::size_t>(half_bins_)),
        physical_(static_cast<std::size_t>(n)) {
    fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    for (Eigen::Index m = 0; m < half_bins_; ++m) {
      // Domain length 2, so mode m has wavenumber pi m.
      const double k = std::numbers::pi * static_cast<double>(m);
      wavenumber_[static_cast<std::size_t>(m)] = k;
      // Linear part: d_t xh = -(ik)^3 xh = i k^3 xh.
      half_phase_[static_cast<std::size_t>(m)] =
          std::polar(1.0, k * k * k * 0.5 * dt_);
    }
  }

  void run(double* x, long steps) {
    Spectrum xh;
    to_spectral(x, xh);
    truncate(xh);
    Spectrum k1, k2, k3, k4, tmp(xh.size());
    for (long s = 0; s < steps; ++s) {
      apply_half_phase(xh);
      nonlinear(xh, k1);
      axpy(xh, 0.5 * dt_, k1, tmp);
      nonlinear(tmp, k2);
      axpy(xh, 0.5 * dt_, k2, tmp);
      nonlinear(tmp, k3);
      axpy(xh, dt_, k3, tmp);
      nonlinear(tmp, k4);
      for (std::size_t m = 0; m < xh.size(); ++m) {
        xh[m] += dt_ / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
      }
      truncate(xh);
      apply_half_phase(xh);
    }
    to_physical(xh, x);
  }

 private:
  void to_spectral(const double* x, Spectrum& xh) {
    physical_.assign(x, x + n_);
    fft_.fwd(xh, physical_);
    xh.resize(static_cast<std::size_t>(half_bins_));
  }

  void to_physical(const Spectrum& xh, double* x) {
    fft_.inv(physical_, xh, n_);
    for (Eigen::Index i = 0; i < n_; ++i) x[i] = physical_[static_cast<std::size_t>(i)];
  }

  void truncate(Spectrum& xh) const {
    for (Eigen::Index m = cutoff_ + 1; m < half_bins_; ++m) {
      xh[static_cast<std::size_t>(m)] = 0.0;
    }
    // The Nyquist bin has no well-defined derivative; keep it at zero.
    xh[static_cast<std::size_t>(half_bins_ - 1)] = 0.0;
  }

  void apply_half_phase(Spectrum& xh) const {
    for (std::size_t m = 0; m < xh.size(); ++m) xh[m] *= half_phase_[m];
  }

  // N(xh) = -3 i k FFT(x^2), dealiased.
  void nonlinear(const Spectrum& xh, Spectrum& out) {
    fft_.inv(physical_, xh, n_);
    for (double& v : physical_) v *= v;
    fft_.fwd(out, physical_);
    out.resize(static_cast<std::size_t>(half_bins_));
    for (std::size_t m = 0; m < out.size(); ++m) {
      out[m] *= Complex(0.0, -3.0 * wavenumber_[m]);
    }
    truncate(out);
  }

  static void axpy(const Spectrum& x, double a, const Spectrum& y, Spectrum& out) {
    out.resize(x.size());
    for (std::size_t m = 0; m < x.size(); ++m) out[m] = x[m] + a * y[m];
  }

  Eigen::Index n_;
  Eigen::Index half_bins_;
  Eigen::Index cutoff_;
  double dt_;
  std::vector<double> wavenumber_;
  Spectrum half_phase_;
  std::vector<double> physical_;
  Eigen::FFT<double> fft_;
};

}  // namespace

Eigen::MatrixXd kdv_propagate(const Eigen::MatrixXd& states,
                              const KdVConfig& cfg, double duration) {
  cfg.validate();
  if (states.rows() != cfg.grid_points) {
    throw InvalidParameterError("KdV state length does not match grid_points");
  }
  const long steps = step_count(duration, cfg.internal_dt);
  if (steps == 0) return states;
  Eigen::MatrixXd out = states;
  const Eigen::Index n = out.cols();
  bool finite = true;
#pragma omp parallel
  {
    SplitStepSolver solver(cfg.grid_points, cfg);
#pragma omp for schedule(static) reduction(&& : finite)
    for (Eigen::Index j = 0; j < n; ++j) {
      solver.run(out.col(j).data(), steps);
      finite = finite && out.col(j).allFinite();
    }
  }
  if (!finite) throw DivergenceError("KdV state became non-finite");
  return out;
}

Eigen::VectorXd kdv_propagate(const Eigen::VectorXd& x, const KdVConfig& cfg,
                              double duration) {
  Eigen::MatrixXd m = x;
  return kdv_propagate(m, cfg, duration).col(0);
}

Ensemble kdv_propagate(const Ensemble& ens, const KdVConfig& cfg,
                       double duration) {
  return Ensemble(kdv_propagate(ens.states(), cfg, duration));
}

Eigen::VectorXd kdv_bump(double eta, Eigen::Index grid_points) {
  const Eigen::VectorXd s = kdv_grid(grid_points);
  return (-(s.array() / eta).square()).exp().matrix();
}

Eigen::VectorXd kdv_initial_etas(Eigen::Index n) {
  if (n < 1) throw InvalidParameterError("KdV ensemble needs N >= 1");
  const double lo = std::log(0.05);
  const double hi = std::log(0.3);
  Eigen::VectorXd eta(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    eta[j] = std::exp(lo + u * (hi - lo));
  }
  return eta;
}

Ensemble kdv_initial(Eigen::Index n, Eigen::Index grid_points) {
  const Eigen::VectorXd eta = kdv_initial_etas(n);
  Eigen::MatrixXd x(grid_points, n);
  for (Eigen::Index j = 0; j < n; ++j) x.col(j) = kdv_bump(eta[j], grid_points);
  return Ensemble(std::move(x));
}

Eigen::VectorXd kdv_truth(Eigen::Index grid_points) {
  return kdv_bump(0.2, grid_points);
}

}  // namespace enkpf
