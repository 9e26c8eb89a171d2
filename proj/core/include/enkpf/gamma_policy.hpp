#pragma once

#include <vector>

namespace enkpf {

enum class GammaMode { Fixed, AdaptiveEss, AdaptiveDiv, AdaptiveSpread };

/// How the EnKPF chooses gamma: a fixed value, or the smallest grid value
/// whose diversity criterion reaches the lower band edge tau0.
///
/// For AdaptiveEss and AdaptiveDiv the criterion is compared against tau0 * N;
/// for AdaptiveSpread the score is already normalized to [0, 1] and compared
/// against tau0. The upper edge tau1 is only reported, never enforced.
struct GammaPolicy {
  GammaMode mode = GammaMode::AdaptiveEss;
  double gamma = 1.0;  // used when mode == Fixed
  double tau0 = 0.25;
  double tau1 = 0.5;
  std::vector<double> grid = default_grid();
  int max_probes = 4;

  static GammaPolicy fixed(double gamma);
  static GammaPolicy adaptive(GammaMode mode, double tau0, double tau1);

  /// {k / 15 : k = 0..15}.
  static std::vector<double> default_grid(int steps = 15);

  /// Throws InvalidParameterError when the band, grid or gamma is malformed.
  void validate() const;
};

}  // namespace enkpf
