#include "enkpf/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "enkpf/error.hpp"

namespace enkpf {

Ensemble::Ensemble(Eigen::MatrixXd states) : states_(std::move(states)) {
  if (states_.rows() < 1) {
    throw DegenerateEnsembleError("ensemble state dimension must be >= 1");
  }
  if (states_.cols() < 2) {
    throw DegenerateEnsembleError("ensemble needs at least 2 members, got " +
                                  std::to_string(states_.cols()));
  }
  if (!states_.allFinite()) {
    throw DegenerateEnsembleError("ensemble contains non-finite entries");
  }
}

MomentEstimate sample_moments(const Eigen::MatrixXd& states) {
  const Eigen::Index n = states.cols();
  if (n < 2) {
    throw DegenerateEnsembleError("sample moments need at least 2 members");
  }
  MomentEstimate m;
  m.mean = states.rowwise().mean();
  const Eigen::MatrixXd anomalies = states.colwise() - m.mean;
  m.covariance = anomalies * anomalies.transpose() / static_cast<double>(n - 1);
  // The product above is symmetric up to rounding; make it exact.
  m.covariance = 0.5 * (m.covariance + m.covariance.transpose()).eval();
  return m;
}

MomentEstimate sample_moments(const Ensemble& ens) {
  return sample_moments(ens.states());
}

double component_distance(Eigen::Index i, Eigen::Index k, Eigen::Index q,
                          Topology topology) {
  const Eigen::Index d = std::abs(i - k);
  if (topology == Topology::Ring) return static_cast<double>(std::min(d, q - d));
  return static_cast<double>(d);
}

double gaspari_cohn(double r) {
  r = std::abs(r);
  if (r <= 1.0) {
    const double r2 = r * r;
    return 1.0 - 5.0 / 3.0 * r2 + 5.0 / 8.0 * r2 * r + 0.5 * r2 * r2 -
           0.25 * r2 * r2 * r;
  }
  if (r < 2.0) {
    const double r2 = r * r;
    return 4.0 - 5.0 * r + 5.0 / 3.0 * r2 + 5.0 / 8.0 * r2 * r -
           0.5 * r2 * r2 + r2 * r2 * r / 12.0 - 2.0 / (3.0 * r);
  }
  return 0.0;
}

Eigen::MatrixXd taper_matrix(const TaperSpec& spec, Eigen::Index q) {
  if (q < 1) throw InvalidParameterError("taper dimension must be >= 1");
  if (spec.kind == TaperKind::None) return Eigen::MatrixXd::Ones(q, q);
  if (!(spec.support > 0.0) || !std::isfinite(spec.support)) {
    throw InvalidParameterError("taper support must be positive, got " +
                                std::to_string(spec.support));
  }
  Eigen::MatrixXd c(q, q);
  for (Eigen::Index k = 0; k < q; ++k) {
    c(k, k) = 1.0;
    for (Eigen::Index i = k + 1; i < q; ++i) {
      const double d = component_distance(i, k, q, spec.topology);
      double v = 0.0;
      if (spec.kind == TaperKind::Triangular) {
        v = std::max(0.0, 1.0 - d / spec.support);
      } else {
        // Clamp tiny negative rounding near r = 2.
        v = std::clamp(gaspari_cohn(d / spec.support), 0.0, 1.0);
      }
      c(i, k) = v;
      c(k, i) = v;
    }
  }
  return c;
}

MomentEstimate tapered_covariance(const Ensemble& ens,
                                  const Eigen::MatrixXd& taper) {
  if (taper.rows() != ens.dim() || taper.cols() != ens.dim()) {
    throw InvalidParameterError("taper matrix does not match state dimension");
  }
  MomentEstimate m = sample_moments(ens);
  m.covariance = m.covariance.cwiseProduct(taper);
  return m;
}

MomentEstimate tapered_covariance(const Ensemble& ens, const TaperSpec& spec) {
  if (spec.kind == TaperKind::None) {
    return sample_moments(ens);
  }
  return tapered_covariance(ens, taper_matrix(spec, ens.dim()));
}

}  // namespace enkpf
