#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace enkpf {

/// Roles of the independent random substreams consumed by filters and
/// experiments. The numeric values are part of the reproducibility contract.
enum class StreamRole : std::uint64_t {
  Resample = 1,
  StageOneNoise = 2,  // EnKF perturbations and the first EnKPF stage
  StageTwoNoise = 3,
  TruthInitial = 4,
  EnsembleInitial = 5,
  ObservationNoise = 6,
  SystemNoise = 7,
  Scenario = 8,
};

/// Hierarchical, keyed random streams.
///
/// A `RandomStreams` value is an immutable key. `child(tag)` derives a new key
/// (e.g. one per cycle) and `engine(role, member)` returns a freshly seeded
/// generator for that leaf. Draws for member j never depend on how many draws
/// other members consumed, so results are independent of evaluation order and
/// thread count.
class RandomStreams {
 public:
  using Engine = std::mt19937_64;

  explicit RandomStreams(std::uint64_t seed);

  [[nodiscard]] RandomStreams child(std::uint64_t tag) const;
  [[nodiscard]] Engine engine(StreamRole role, std::uint64_t member = 0) const;

  [[nodiscard]] std::uint64_t key() const { return key_; }

 private:
  struct FromKey {};
  RandomStreams(FromKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
};

/// Fills a vector with independent standard normal draws.
Eigen::VectorXd standard_normal(RandomStreams::Engine& engine, Eigen::Index n);

}  // namespace enkpf
