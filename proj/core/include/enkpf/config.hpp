#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "enkpf/ensemble.hpp"
#include "enkpf/gamma_policy.hpp"
#include "enkpf/kdv.hpp"
#include "enkpf/lorenz96.hpp"
#include "enkpf/static_prior.hpp"

namespace enkpf {

using ModelConfig = std::variant<Lorenz96Config, KdVConfig, StaticPriorSpec>;

enum class FilterKind { Pf, Enkf, Enkpf };

struct FilterConfig {
  FilterKind kind = FilterKind::Enkpf;
  GammaPolicy policy;  // only used by Enkpf
};

struct ObservationConfig {
  std::vector<Eigen::Index> components;  // zero-based
  double noise_variance = 1.0;
};

/// Complete description of one twin experiment.
struct ExperimentConfig {
  ModelConfig model = Lorenz96Config{};
  FilterConfig filter;
  Eigen::Index ensemble_size = 400;
  int cycles = 1;
  /// Empty for static_prior models, whose observation comes from the scenario.
  ObservationConfig observation;
  TaperSpec taper;
  std::uint64_t seed = 0;
  std::string output;

  [[nodiscard]] Eigen::Index state_dim() const;
  void validate() const;
};

/// Parses the JSON configuration format. Unknown keys anywhere are rejected
/// with ConfigError. Observed components are one-based in the file.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& cfg);

/// The configurations used for the Lorenz 96 and KdV studies.
ExperimentConfig lorenz96_reference_config(FilterConfig filter, int cycles,
                                           std::uint64_t seed);
ExperimentConfig kdv_reference_config(FilterConfig filter, Eigen::Index n,
                                      std::uint64_t seed);

/// Default KdV observation sites (zero-based grid indices).
std::vector<Eigen::Index> kdv_default_sites();

const char* to_string(FilterKind k);
const char* to_string(GammaMode m);

}  // namespace enkpf
