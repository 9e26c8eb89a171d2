#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "enkpf/config.hpp"
#include "enkpf/ensemble.hpp"
#include "enkpf/observation.hpp"
#include "enkpf/random.hpp"

namespace enkpf {

/// Forward model used by the twin-experiment driver. `system_noise` is the
/// substream reserved for stochastic dynamics; the bundled models are
/// deterministic and ignore it.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  [[nodiscard]] virtual Eigen::Index state_dim() const = 0;
  [[nodiscard]] virtual double lead_time() const = 0;
  [[nodiscard]] virtual Eigen::MatrixXd propagate(
      const Eigen::MatrixXd& states, double duration,
      const RandomStreams& system_noise) const = 0;
  [[nodiscard]] virtual Ensemble initial_ensemble(const RandomStreams& streams,
                                                  Eigen::Index n) const = 0;
  [[nodiscard]] virtual Eigen::VectorXd initial_truth(
      const RandomStreams& streams) const = 0;
};

/// Throws ConfigError for static_prior, which has no dynamics.
std::unique_ptr<ForwardModel> make_model(const ModelConfig& cfg);

struct FilterOutcome {
  Ensemble ensemble;
  double gamma = 0.0;
  double ess = 0.0;
  double div = 0.0;
};

/// One analysis step with the configured filter. PF reports gamma = 0 and
/// its weight diversity; EnKF reports gamma = 1 and ess = div = N.
FilterOutcome apply_filter(const FilterConfig& filter, const Ensemble& forecast,
                           const LinearGaussianObservation& obs,
                           const Eigen::MatrixXd& taper,
                           const RandomStreams& streams);

struct CycleRecord {
  int cycle = 0;
  double time = 0.0;
  double gamma = 0.0;
  double ess_frac = 0.0;
  double div_frac = 0.0;
  double rmse = 0.0;
  double crps_1 = 0.0;
  double crps_2 = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<CycleRecord> records;
  Eigen::MatrixXd final_ensemble;
  Eigen::VectorXd final_truth;  // empty for static_prior
  bool aborted = false;
  std::string failure;
};

struct RunOptions {
  /// Measure wall_ms; otherwise it is written as 0 so output is reproducible.
  bool record_timing = false;
  /// Called after every analysis, before the next propagation.
  std::function<void(const CycleRecord&)> on_record;
};

/// Runs the experiment. Truth, initial ensemble and observations are keyed by
/// the seed only, so different filters see the same truth and observations.
/// Filter failures (degenerate weights, divergence) end the run early with
/// `aborted` set; the records up to that point are kept.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options = {});

/// Runs the experiment and writes cycles.csv (flushed per cycle),
/// summary.csv, final_ensemble.csv, final_truth.csv and config.json into
/// `dir`.
ExperimentResult run_to_directory(const ExperimentConfig& cfg,
                                  const std::string& dir,
                                  const RunOptions& options = {});

inline constexpr const char* kCyclesHeader =
    "cycle,time,gamma,ess_frac,div_frac,rmse,crps_1,crps_2,wall_ms";
inline constexpr const char* kSummaryHeader = "score,p10,p50,mean,p90";

void write_cycle_row(std::ostream& out, const CycleRecord& r);
std::vector<CycleRecord> read_cycles_csv(std::istream& in);
std::vector<CycleRecord> read_cycles_csv(const std::string& path);

struct SummaryRow {
  std::string score;
  double p10 = 0.0;
  double p50 = 0.0;
  double mean = 0.0;
  double p90 = 0.0;
};

/// Linear-interpolation quantile (position (n - 1) p of the sorted values).
double quantile(std::vector<double> values, double p);

/// Deciles, median and mean of rmse, crps_1 and crps_2. NaN scores (static
/// scenarios) are skipped; throws InvalidParameterError on empty input.
std::vector<SummaryRow> summarize(const std::vector<CycleRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace enkpf
