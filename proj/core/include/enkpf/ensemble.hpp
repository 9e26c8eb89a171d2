#pragma once

#include <Eigen/Core>

namespace enkpf {

/// A q x N matrix whose columns are the particles of one ensemble.
class Ensemble {
 public:
  /// Throws DegenerateEnsembleError unless q >= 1, N >= 2 and every entry is
  /// finite.
  explicit Ensemble(Eigen::MatrixXd states);

  [[nodiscard]] const Eigen::MatrixXd& states() const { return states_; }
  [[nodiscard]] Eigen::Index dim() const { return states_.rows(); }
  [[nodiscard]] Eigen::Index size() const { return states_.cols(); }
  [[nodiscard]] auto member(Eigen::Index j) const { return states_.col(j); }

  /// Moves the matrix out; the ensemble is left empty.
  [[nodiscard]] Eigen::MatrixXd release() && { return std::move(states_); }

 private:
  Eigen::MatrixXd states_;
};

enum class TaperKind { None, Triangular, GaspariCohn };
enum class Topology { Line, Ring };

/// Compactly supported correlation used to localize sample covariances.
/// `support` is the range for the triangular taper and the half-length c for
/// Gaspari-Cohn (zero beyond 2c).
struct TaperSpec {
  TaperKind kind = TaperKind::None;
  double support = 0.0;
  Topology topology = Topology::Line;

  static TaperSpec none() { return {}; }
  static TaperSpec triangular(double range, Topology t = Topology::Line) {
    return {TaperKind::Triangular, range, t};
  }
  static TaperSpec gaspari_cohn(double half_length, Topology t = Topology::Ring) {
    return {TaperKind::GaspariCohn, half_length, t};
  }
};

struct MomentEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

MomentEstimate sample_moments(const Eigen::MatrixXd& states);
MomentEstimate sample_moments(const Ensemble& ens);

/// Distance between components i and k: |i-k| on a line, the shorter way
/// around on a ring of q components.
double component_distance(Eigen::Index i, Eigen::Index k, Eigen::Index q,
                          Topology topology);

/// Gaspari-Cohn fifth-order compactly supported correlation at r = d / c.
double gaspari_cohn(double r);

Eigen::MatrixXd taper_matrix(const TaperSpec& spec, Eigen::Index q);

/// Sample covariance multiplied elementwise by the taper matrix.
MomentEstimate tapered_covariance(const Ensemble& ens, const TaperSpec& spec);

/// Same as above with a precomputed taper matrix (reused across cycles).
MomentEstimate tapered_covariance(const Ensemble& ens,
                                  const Eigen::MatrixXd& taper);

}  // namespace enkpf
