#include "enkpf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "enkpf/error.hpp"

namespace enkpf {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return get_or<T>(j, key, T{}, where);
}

ModelConfig parse_model(const json& j) {
  const std::string kind = require<std::string>(j, "kind", "model");
  if (kind == "lorenz96") {
    reject_unknown(j, {"kind", "q", "forcing", "dt", "lead_time"}, "model");
    Lorenz96Config c;
    c.q = get_or<Eigen::Index>(j, "q", c.q, "model");
    c.forcing = get_or<double>(j, "forcing", c.forcing, "model");
    c.dt = get_or<double>(j, "dt", c.dt, "model");
    c.lead_time = get_or<double>(j, "lead_time", c.lead_time, "model");
    return c;
  }
  if (kind == "kdv") {
    reject_unknown(j, {"kind", "grid_points", "internal_dt", "lead_time", "dealias"},
                   "model");
    KdVConfig c;
    c.grid_points = get_or<Eigen::Index>(j, "grid_points", c.grid_points, "model");
    c.internal_dt = get_or<double>(j, "internal_dt", c.internal_dt, "model");
    c.lead_time = get_or<double>(j, "lead_time", c.lead_time, "model");
    c.dealias = get_or<bool>(j, "dealias", c.dealias, "model");
    return c;
  }
  if (kind == "static_prior") {
    reject_unknown(j, {"kind", "prior", "observation_case", "q", "base_dimension"},
                   "model");
    StaticPriorSpec c;
    const std::string prior = get_or<std::string>(j, "prior", "gaussian", "model");
    if (prior == "gaussian") {
      c.prior = PriorShape::Gaussian;
    } else if (prior == "bimodal") {
      c.prior = PriorShape::Bimodal;
    } else {
      throw ConfigError("model.prior must be 'gaussian' or 'bimodal'");
    }
    c.observation_case = get_or<int>(j, "observation_case", c.observation_case, "model");
    c.q = get_or<Eigen::Index>(j, "q", c.q, "model");
    c.base_dimension = get_or<Eigen::Index>(j, "base_dimension", c.base_dimension, "model");
    return c;
  }
  throw ConfigError("model.kind must be lorenz96, kdv or static_prior");
}

GammaMode parse_mode(const std::string& m) {
  if (m == "fixed") return GammaMode::Fixed;
  if (m == "adaptive_ess") return GammaMode::AdaptiveEss;
  if (m == "adaptive_div") return GammaMode::AdaptiveDiv;
  if (m == "adaptive_spread") return GammaMode::AdaptiveSpread;
  throw ConfigError("unknown gamma mode '" + m + "'");
}

FilterConfig parse_filter(const json& j) {
  const std::string kind = require<std::string>(j, "kind", "filter");
  FilterConfig f;
  if (kind == "pf" || kind == "enkf") {
    reject_unknown(j, {"kind"}, "filter");
    f.kind = kind == "pf" ? FilterKind::Pf : FilterKind::Enkf;
    return f;
  }
  if (kind != "enkpf") throw ConfigError("filter.kind must be pf, enkf or enkpf");
  reject_unknown(j, {"kind", "gamma"}, "filter");
  f.kind = FilterKind::Enkpf;
  const json& g = j.contains("gamma") ? j.at("gamma") : json::object();
  reject_unknown(g, {"mode", "value", "band", "grid_steps", "max_probes"},
                 "filter.gamma");
  GammaPolicy p;
  p.mode = parse_mode(get_or<std::string>(g, "mode", "adaptive_ess", "filter.gamma"));
  if (p.mode == GammaMode::Fixed) {
    p.gamma = require<double>(g, "value", "filter.gamma");
  } else {
    const auto band = get_or<std::vector<double>>(g, "band", {p.tau0, p.tau1},
                                                  "filter.gamma");
    if (band.size() != 2) throw ConfigError("filter.gamma.band must have 2 entries");
    p.tau0 = band[0];
    p.tau1 = band[1];
    p.grid = GammaPolicy::default_grid(get_or<int>(g, "grid_steps", 15, "filter.gamma"));
    p.max_probes = get_or<int>(g, "max_probes", p.max_probes, "filter.gamma");
  }
  f.policy = p;
  return f;
}

TaperSpec parse_taper(const json& j) {
  reject_unknown(j, {"kind", "support", "topology"}, "taper");
  TaperSpec t;
  const std::string kind = get_or<std::string>(j, "kind", "none", "taper");
  if (kind == "none") {
    t.kind = TaperKind::None;
  } else if (kind == "triangular") {
    t.kind = TaperKind::Triangular;
  } else if (kind == "gaspari_cohn") {
    t.kind = TaperKind::GaspariCohn;
  } else {
    throw ConfigError("taper.kind must be none, triangular or gaspari_cohn");
  }
  t.support = get_or<double>(j, "support", 0.0, "taper");
  const std::string topo = get_or<std::string>(j, "topology", "line", "taper");
  if (topo == "line") {
    t.topology = Topology::Line;
  } else if (topo == "ring") {
    t.topology = Topology::Ring;
  } else {
    throw ConfigError("taper.topology must be line or ring");
  }
  return t;
}

ObservationConfig parse_observation(const json& j) {
  reject_unknown(j, {"components", "noise_variance"}, "observation");
  ObservationConfig o;
  const auto comps = require<std::vector<long>>(j, "components", "observation");
  for (const long c : comps) {
    if (c < 1) throw ConfigError("observation.components are one-based");
    o.components.push_back(static_cast<Eigen::Index>(c - 1));
  }
  o.noise_variance = require<double>(j, "noise_variance", "observation");
  return o;
}

json model_to_json(const ModelConfig& m) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Lorenz96Config>) {
          return {{"kind", "lorenz96"}, {"q", c.q}, {"forcing", c.forcing},
                  {"dt", c.dt}, {"lead_time", c.lead_time}};
        } else if constexpr (std::is_same_v<T, KdVConfig>) {
          return {{"kind", "kdv"}, {"grid_points", c.grid_points},
                  {"internal_dt", c.internal_dt}, {"lead_time", c.lead_time},
                  {"dealias", c.dealias}};
        } else {
          return {{"kind", "static_prior"}, {"prior", to_string(c.prior)},
                  {"observation_case", c.observation_case}, {"q", c.q},
                  {"base_dimension", c.base_dimension}};
        }
      },
      m);
}

}  // namespace

Eigen::Index ExperimentConfig::state_dim() const {
  return std::visit(
      [](const auto& c) -> Eigen::Index {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, KdVConfig>) {
          return c.grid_points;
        } else {
          return c.q;
        }
      },
      model);
}

void ExperimentConfig::validate() const {
  std::visit([](const auto& c) { c.validate(); }, model);
  if (ensemble_size < 2) throw ConfigError("ensemble_size must be >= 2");
  if (filter.kind == FilterKind::Enkpf) filter.policy.validate();
  taper_matrix(taper, 1);  // validates the support parameter
  const bool is_static = std::holds_alternative<StaticPriorSpec>(model);
  if (is_static) {
    // A static scenario is a single update; 0 and 1 both mean that.
    if (cycles < 0 || cycles > 1) {
      throw ConfigError("static_prior experiments take cycles 0 or 1");
    }
    if (!observation.components.empty()) {
      throw ConfigError("static_prior experiments define their own observation");
    }
    return;
  }
  if (cycles < 1) throw ConfigError("cycles must be >= 1");
  if (observation.components.empty()) {
    throw ConfigError("observation.components must not be empty");
  }
  const Eigen::Index q = state_dim();
  for (const Eigen::Index c : observation.components) {
    if (c < 0 || c >= q) throw ConfigError("observed component outside [1, q]");
  }
  if (!(observation.noise_variance > 0.0)) {
    throw ConfigError("observation.noise_variance must be positive");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"model", "filter", "ensemble_size", "cycles", "observation",
                     "taper", "seed", "output"},
                 "config");
  ExperimentConfig cfg;
  cfg.model = parse_model(require<json>(j, "model", "config"));
  cfg.filter = parse_filter(require<json>(j, "filter", "config"));
  cfg.ensemble_size = require<Eigen::Index>(j, "ensemble_size", "config");
  cfg.cycles = get_or<int>(j, "cycles", 1, "config");
  if (j.contains("observation")) cfg.observation = parse_observation(j.at("observation"));
  if (j.contains("taper")) cfg.taper = parse_taper(j.at("taper"));
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
  cfg.output = get_or<std::string>(j, "output", "", "config");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json j;
  j["model"] = model_to_json(cfg.model);
  json f = {{"kind", to_string(cfg.filter.kind)}};
  if (cfg.filter.kind == FilterKind::Enkpf) {
    const GammaPolicy& p = cfg.filter.policy;
    json g = {{"mode", to_string(p.mode)}};
    if (p.mode == GammaMode::Fixed) {
      g["value"] = p.gamma;
    } else {
      g["band"] = {p.tau0, p.tau1};
      g["grid_steps"] = static_cast<int>(p.grid.size()) - 1;
      g["max_probes"] = p.max_probes;
    }
    f["gamma"] = g;
  }
  j["filter"] = f;
  j["ensemble_size"] = cfg.ensemble_size;
  j["cycles"] = cfg.cycles;
  if (!cfg.observation.components.empty()) {
    std::vector<long> comps;
    for (const auto c : cfg.observation.components) comps.push_back(static_cast<long>(c) + 1);
    j["observation"] = {{"components", comps},
                        {"noise_variance", cfg.observation.noise_variance}};
  }
  const char* kinds[] = {"none", "triangular", "gaspari_cohn"};
  j["taper"] = {{"kind", kinds[static_cast<int>(cfg.taper.kind)]},
                {"support", cfg.taper.support},
                {"topology", cfg.taper.topology == Topology::Ring ? "ring" : "line"}};
  j["seed"] = cfg.seed;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j.dump(2);
}

std::vector<Eigen::Index> kdv_default_sites() { return {12, 37, 57, 75, 87, 105}; }

ExperimentConfig lorenz96_reference_config(FilterConfig filter, int cycles,
                                           std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.model = Lorenz96Config{};
  cfg.filter = std::move(filter);
  cfg.ensemble_size = 400;
  cfg.cycles = cycles;
  for (Eigen::Index k = 0; k < 40; k += 2) cfg.observation.components.push_back(k);
  cfg.observation.noise_variance = 0.5;
  cfg.taper = TaperSpec::gaspari_cohn(10.0, Topology::Ring);
  cfg.seed = seed;
  return cfg;
}

ExperimentConfig kdv_reference_config(FilterConfig filter, Eigen::Index n,
                                      std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.model = KdVConfig{};
  cfg.filter = std::move(filter);
  cfg.ensemble_size = n;
  cfg.cycles = 10;
  cfg.observation.components = kdv_default_sites();
  cfg.observation.noise_variance = 0.02;
  cfg.taper = TaperSpec::none();
  cfg.seed = seed;
  return cfg;
}

const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::Pf: return "pf";
    case FilterKind::Enkf: return "enkf";
    case FilterKind::Enkpf: return "enkpf";
  }
  return "?";
}

const char* to_string(GammaMode m) {
  switch (m) {
    case GammaMode::Fixed: return "fixed";
    case GammaMode::AdaptiveEss: return "adaptive_ess";
    case GammaMode::AdaptiveDiv: return "adaptive_div";
    case GammaMode::AdaptiveSpread: return "adaptive_spread";
  }
  return "?";
}

}  // namespace enkpf
