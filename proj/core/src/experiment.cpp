#include "enkpf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "enkpf/csv_io.hpp"
#include "enkpf/enkf.hpp"
#include "enkpf/enkpf.hpp"
#include "enkpf/error.hpp"
#include "enkpf/kdv.hpp"
#include "enkpf/lorenz96.hpp"
#include "enkpf/particle_filter.hpp"
#include "enkpf/scoring.hpp"
#include "enkpf/static_prior.hpp"

namespace enkpf {
namespace {

class Lorenz96Model final : public ForwardModel {
 public:
  explicit Lorenz96Model(Lorenz96Config cfg) : cfg_(cfg) { cfg_.validate(); }
  Eigen::Index state_dim() const override { return cfg_.q; }
  double lead_time() const override { return cfg_.lead_time; }
  Eigen::MatrixXd propagate(const Eigen::MatrixXd& x, double duration,
                            const RandomStreams&) const override {
    return lorenz96_propagate(x, cfg_, duration);
  }
  Ensemble initial_ensemble(const RandomStreams& s, Eigen::Index n) const override {
    return lorenz96_initial(s, n, cfg_.q);
  }
  Eigen::VectorXd initial_truth(const RandomStreams& s) const override {
    return lorenz96_truth(s, cfg_.q);
  }

 private:
  Lorenz96Config cfg_;
};

class KdVModel final : public ForwardModel {
 public:
  explicit KdVModel(KdVConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  Eigen::Index state_dim() const override { return cfg_.grid_points; }
  double lead_time() const override { return cfg_.lead_time; }
  Eigen::MatrixXd propagate(const Eigen::MatrixXd& x, double duration,
                            const RandomStreams&) const override {
    return kdv_propagate(x, cfg_, duration);
  }
  Ensemble initial_ensemble(const RandomStreams&, Eigen::Index n) const override {
    return kdv_initial(n, cfg_.grid_points);
  }
  Eigen::VectorXd initial_truth(const RandomStreams&) const override {
    return kdv_truth(cfg_.grid_points);
  }

 private:
  KdVConfig cfg_;
};

// Substream tags below the root key.
constexpr std::uint64_t kScenarioTag = 0;
constexpr std::uint64_t kFilterTag = 1;
constexpr std::uint64_t kSystemNoiseTag = 2;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   since)
      .count();
}

CycleRecord score(int cycle, double time, const FilterOutcome& out,
                  const Eigen::VectorXd& truth) {
  const auto n = static_cast<double>(out.ensemble.size());
  CycleRecord r;
  r.cycle = cycle;
  r.time = time;
  r.gamma = out.gamma;
  r.ess_frac = out.ess / n;
  r.div_frac = out.div / n;
  if (truth.size() == 0) {
    r.rmse = r.crps_1 = r.crps_2 = std::nan("");
  } else {
    r.rmse = rmse(out.ensemble, truth);
    r.crps_1 = crps(out.ensemble.states(), 0, truth[0]);
    r.crps_2 = out.ensemble.dim() > 1 ? crps(out.ensemble.states(), 1, truth[1])
                                      : std::nan("");
  }
  return r;
}

ExperimentResult run_static(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto& spec = std::get<StaticPriorSpec>(cfg.model);
  const RandomStreams root(cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd base = static_base_sample(root.child(kScenarioTag),
                                                  cfg.ensemble_size, spec.base_dimension);
  const StaticScenario sc = make_static_scenario(spec, base);
  const Eigen::MatrixXd taper = taper_matrix(cfg.taper, spec.q);

  ExperimentResult result;
  try {
    FilterOutcome out = apply_filter(cfg.filter, sc.ensemble, sc.obs, taper,
                                     root.child(1).child(kFilterTag));
    CycleRecord rec = score(1, 0.0, out, Eigen::VectorXd());
    if (options.record_timing) rec.wall_ms = elapsed_ms(start);
    if (options.on_record) options.on_record(rec);
    result.records.push_back(rec);
    result.final_ensemble = out.ensemble.states();
  } catch (const Error& e) {
    result.aborted = true;
    result.failure = e.what();
  }
  return result;
}

}  // namespace

std::unique_ptr<ForwardModel> make_model(const ModelConfig& cfg) {
  if (const auto* l = std::get_if<Lorenz96Config>(&cfg)) {
    return std::make_unique<Lorenz96Model>(*l);
  }
  if (const auto* k = std::get_if<KdVConfig>(&cfg)) {
    return std::make_unique<KdVModel>(*k);
  }
  throw ConfigError("static_prior has no forward model");
}

FilterOutcome apply_filter(const FilterConfig& filter, const Ensemble& forecast,
                           const LinearGaussianObservation& obs,
                           const Eigen::MatrixXd& taper,
                           const RandomStreams& streams) {
  const auto n = static_cast<double>(forecast.size());
  switch (filter.kind) {
    case FilterKind::Pf: {
      PfResult r = pf_update(forecast, obs, streams);
      return {std::move(r.ensemble), 0.0, r.diagnostics.ess, r.diagnostics.div};
    }
    case FilterKind::Enkf: {
      return {enkf_update(forecast, obs, tapered_covariance(forecast, taper), streams),
              1.0, n, n};
    }
    case FilterKind::Enkpf: {
      EnkpfResult r = enkpf_update(forecast, obs, filter.policy,
                                   tapered_covariance(forecast, taper), streams);
      return {std::move(r.ensemble), r.diagnostics.gamma, r.diagnostics.ess,
              r.diagnostics.div};
    }
  }
  throw InvalidParameterError("unknown filter kind");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  cfg.validate();
  if (std::holds_alternative<StaticPriorSpec>(cfg.model)) {
    return run_static(cfg, options);
  }
  const auto model = make_model(cfg.model);
  const Eigen::Index q = model->state_dim();
  const RandomStreams root(cfg.seed);
  const RandomStreams init = root.child(kScenarioTag);

  Eigen::VectorXd truth = model->initial_truth(init);
  Ensemble ens = model->initial_ensemble(init, cfg.ensemble_size);
  const Eigen::MatrixXd taper = taper_matrix(cfg.taper, q);
  const LinearGaussianObservation obs_template = LinearGaussianObservation::diagonal(
      cfg.observation.components, q, cfg.observation.noise_variance,
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.observation.components.size())));

  ExperimentResult result;
  const double lead = model->lead_time();
  try {
    for (int cycle = 1; cycle <= cfg.cycles; ++cycle) {
      const auto start = std::chrono::steady_clock::now();
      const RandomStreams streams = root.child(static_cast<std::uint64_t>(cycle) + 16);
      const RandomStreams noise = streams.child(kSystemNoiseTag);

      Eigen::MatrixXd t = truth;
      truth = model->propagate(t, lead, noise.child(0)).col(0);
      Ensemble forecast(model->propagate(ens.states(), lead, noise.child(1)));

      auto engine = streams.engine(StreamRole::ObservationNoise);
      const Eigen::VectorXd y =
          obs_template.op().apply(truth) +
          obs_template.noise_chol() * standard_normal(engine, obs_template.obs_dim());
      const LinearGaussianObservation obs = obs_template.with_value(y);

      FilterOutcome out =
          apply_filter(cfg.filter, forecast, obs, taper, streams.child(kFilterTag));
      CycleRecord rec = score(cycle, cycle * lead, out, truth);
      if (options.record_timing) rec.wall_ms = elapsed_ms(start);
      ens = std::move(out.ensemble);
      if (options.on_record) options.on_record(rec);
      result.records.push_back(rec);
    }
  } catch (const Error& e) {
    result.aborted = true;
    result.failure = e.what();
  }
  result.final_ensemble = ens.states();
  result.final_truth = truth;
  return result;
}

void write_cycle_row(std::ostream& out, const CycleRecord& r) {
  out << r.cycle << ',' << format_number(r.time) << ',' << format_number(r.gamma)
      << ',' << format_number(r.ess_frac) << ',' << format_number(r.div_frac) << ','
      << format_number(r.rmse) << ',' << format_number(r.crps_1) << ','
      << format_number(r.crps_2) << ',' << format_number(r.wall_ms) << '\n';
}

std::vector<CycleRecord> read_cycles_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("cycles file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCyclesHeader) throw IoError("unexpected cycles header: " + line);
  std::vector<CycleRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw IoError("cycles rows need 9 fields");
    CycleRecord r;
    r.cycle = static_cast<int>(parse_number(f[0]));
    r.time = parse_number(f[1]);
    r.gamma = parse_number(f[2]);
    r.ess_frac = parse_number(f[3]);
    r.div_frac = parse_number(f[4]);
    r.rmse = parse_number(f[5]);
    r.crps_1 = parse_number(f[6]);
    r.crps_2 = parse_number(f[7]);
    r.wall_ms = parse_number(f[8]);
    records.push_back(r);
  }
  return records;
}

std::vector<CycleRecord> read_cycles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_cycles_csv(in);
}

ExperimentResult run_to_directory(const ExperimentConfig& cfg,
                                  const std::string& dir,
                                  const RunOptions& options) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  {
    std::ofstream c(root / "config.json");
    c << dump_config(cfg) << '\n';
  }
  std::ofstream cycles(root / "cycles.csv");
  if (!cycles) throw IoError("cannot write " + (root / "cycles.csv").string());
  cycles << kCyclesHeader << '\n' << std::flush;

  RunOptions opts = options;
  opts.on_record = [&](const CycleRecord& r) {
    write_cycle_row(cycles, r);
    cycles.flush();
    if (options.on_record) options.on_record(r);
  };
  ExperimentResult result = run_experiment(cfg, opts);

  if (!result.records.empty()) {
    std::ofstream s(root / "summary.csv");
    write_summary_csv(s, summarize(result.records));
  }
  if (result.final_ensemble.size() > 0) {
    write_matrix_csv((root / "final_ensemble.csv").string(), result.final_ensemble);
  }
  if (result.final_truth.size() > 0) {
    write_matrix_csv((root / "final_truth.csv").string(),
                     Eigen::MatrixXd(result.final_truth));
  }
  return result;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidParameterError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameterError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<CycleRecord>& records) {
  if (records.empty()) throw InvalidParameterError("no records to summarize");
  const std::pair<const char*, double CycleRecord::*> columns[] = {
      {"rmse", &CycleRecord::rmse},
      {"crps_1", &CycleRecord::crps_1},
      {"crps_2", &CycleRecord::crps_2},
  };
  std::vector<SummaryRow> rows;
  for (const auto& [name, member] : columns) {
    std::vector<double> v;
    for (const auto& r : records) {
      if (!std::isnan(r.*member)) v.push_back(r.*member);
    }
    SummaryRow row{name, std::nan(""), std::nan(""), std::nan(""), std::nan("")};
    if (!v.empty()) {
      double sum = 0.0;
      for (const double x : v) sum += x;
      row.mean = sum / static_cast<double>(v.size());
      row.p10 = quantile(v, 0.1);
      row.p50 = quantile(v, 0.5);
      row.p90 = quantile(v, 0.9);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.score << ',' << format_number(r.p10) << ',' << format_number(r.p50)
        << ',' << format_number(r.mean) << ',' << format_number(r.p90) << '\n';
  }
}

}  // namespace enkpf
