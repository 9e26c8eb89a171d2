// Command line front end: run, sweep, summarize, update.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "enkpf/config.hpp"
#include "enkpf/csv_io.hpp"
#include "enkpf/enkpf.hpp"
#include "enkpf/error.hpp"
#include "enkpf/experiment.hpp"
#include "enkpf/static_prior.hpp"

namespace {

using namespace enkpf;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, bool timing) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.output = *out;
  if (cfg.output.empty()) throw ConfigError("no output directory (set \"output\" or --out)");
  RunOptions opts;
  opts.record_timing = timing;
  const ExperimentResult result = run_to_directory(cfg, cfg.output, opts);
  std::cerr << "wrote " << result.records.size() << " cycles to " << cfg.output << '\n';
  if (result.aborted) {
    std::cerr << "run aborted: " << result.failure << '\n';
    return 3;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::string> out,
              bool raw_covariance) {
  const ExperimentConfig cfg = load_config(config_path);
  const auto* spec = std::get_if<StaticPriorSpec>(&cfg.model);
  if (spec == nullptr) throw ConfigError("sweep needs a static_prior model");

  SweepOptions options;
  options.dims.clear();
  for (const Eigen::Index q : {10, 50, 250}) {
    if (q <= spec->base_dimension) options.dims.push_back(q);
  }
  if (cfg.taper.kind != TaperKind::None) options.taper = cfg.taper;
  options.tapered_approximation = !raw_covariance;

  const RandomStreams root(cfg.seed);
  const Eigen::MatrixXd base =
      static_base_sample(root.child(0), cfg.ensemble_size, spec->base_dimension);
  const auto rows = diversity_sweep(base, options);

  std::ofstream file;
  if (out) {
    file.open(*out);
    if (!file) throw IoError("cannot write " + *out);
  }
  std::ostream& os = out ? static_cast<std::ostream&>(file) : std::cout;
  os << "prior,observation,q,gamma,ess_frac,ess_frac_approx\n";
  for (const auto& r : rows) {
    os << to_string(r.prior) << ",y" << r.observation_case << ',' << r.q << ','
       << format_number(r.gamma) << ',' << format_number(r.ess_frac) << ','
       << format_number(r.ess_frac_approx) << '\n';
  }
  return 0;
}

int cmd_summarize(const std::string& in) {
  write_summary_csv(std::cout, summarize(read_cycles_csv(in)));
  return 0;
}

struct UpdateArgs {
  std::string ensemble;
  std::string obs;
  std::string gamma = "auto";
  std::string mode = "ess";
  std::vector<double> band{0.25, 0.5};
  std::string taper = "none";
  double support = 0.0;
  std::string topology = "ring";
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

GammaMode parse_mode(const std::string& s) {
  if (s == "ess") return GammaMode::AdaptiveEss;
  if (s == "div") return GammaMode::AdaptiveDiv;
  if (s == "spread") return GammaMode::AdaptiveSpread;
  throw ConfigError("unknown gamma mode: " + s);
}

TaperSpec parse_taper(const UpdateArgs& a) {
  const Topology topo = a.topology == "line" ? Topology::Line : Topology::Ring;
  if (a.topology != "line" && a.topology != "ring") {
    throw ConfigError("topology must be line or ring");
  }
  if (a.taper == "none") return TaperSpec::none();
  if (a.taper == "triangular") return TaperSpec::triangular(a.support, topo);
  if (a.taper == "gaspari_cohn") return TaperSpec::gaspari_cohn(a.support, topo);
  throw ConfigError("unknown taper: " + a.taper);
}

int cmd_update(const UpdateArgs& a) {
  const Ensemble ens(read_matrix_csv(a.ensemble));
  const LinearGaussianObservation obs = read_observation_csv(a.obs, ens.dim());

  GammaPolicy policy;
  if (a.gamma == "auto") {
    if (a.band.size() != 2) throw ConfigError("--band takes two values");
    policy = GammaPolicy::adaptive(parse_mode(a.mode), a.band[0], a.band[1]);
  } else {
    policy = GammaPolicy::fixed(parse_number(a.gamma));
  }
  const EnkpfResult r =
      enkpf_update(ens, obs, policy, parse_taper(a), RandomStreams(a.seed));

  if (a.out) {
    write_matrix_csv(*a.out, r.ensemble.states());
  } else {
    write_matrix_csv(std::cout, r.ensemble.states());
  }
  const auto n = static_cast<double>(ens.size());
  std::cerr << "gamma=" << format_number(r.diagnostics.gamma)
            << " ess_frac=" << format_number(r.diagnostics.ess / n)
            << " div_frac=" << format_number(r.diagnostics.div / n) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble Kalman particle filter experiments"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool timing = false;
  auto* run = app.add_subcommand("run", "Run a twin experiment");
  run->add_option("--config", config_path, "JSON configuration")->required();
  run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--out", out, "Output directory (overrides \"output\")");
  run->add_flag("--timing", timing, "Record wall_ms (output is then not reproducible)");

  std::string sweep_config;
  std::optional<std::string> sweep_out;
  bool raw_covariance = false;
  auto* sweep = app.add_subcommand("sweep", "Diversity as a function of gamma");
  sweep->add_option("--config", sweep_config, "JSON configuration")->required();
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep->add_flag("--raw-covariance", raw_covariance,
                  "Use the untapered covariance in the approximation");

  std::string summary_in;
  auto* summ = app.add_subcommand("summarize", "Summary table of a cycles.csv");
  summ->add_option("--in", summary_in, "cycles.csv")->required()->check(CLI::ExistingFile);

  UpdateArgs ua;
  auto* upd = app.add_subcommand("update", "Single EnKPF update");
  upd->add_option("--ensemble", ua.ensemble, "Forecast ensemble CSV")->required();
  upd->add_option("--obs", ua.obs, "Observation CSV")->required();
  upd->add_option("--gamma", ua.gamma, "Gamma in [0, 1] or auto")->required();
  upd->add_option("--mode", ua.mode, "Adaptive criterion: ess, div or spread");
  upd->add_option("--band", ua.band, "Diversity band tau0 tau1")->expected(2);
  upd->add_option("--taper", ua.taper, "none, triangular or gaspari_cohn");
  upd->add_option("--support", ua.support, "Taper range or half-length");
  upd->add_option("--topology", ua.topology, "line or ring");
  upd->add_option("--seed", ua.seed, "Random seed");
  upd->add_option("--out", ua.out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) return cmd_run(config_path, seed, out, timing);
    if (*sweep) return cmd_sweep(sweep_config, sweep_out, raw_covariance);
    if (*summ) return cmd_summarize(summary_in);
    if (*upd) return cmd_update(ua);
  } catch (const enkpf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
