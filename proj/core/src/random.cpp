#include "enkpf/random.hpp"

namespace enkpf {
namespace {

// SplitMix64 finalizer; used only to derive keys, not as a generator.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t tag) {
  return mix(key ^ mix(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace

RandomStreams::RandomStreams(std::uint64_t seed) : key_(mix(seed)) {}

RandomStreams RandomStreams::child(std::uint64_t tag) const {
  return RandomStreams(FromKey{}, combine(key_, tag));
}

RandomStreams::Engine RandomStreams::engine(StreamRole role,
                                            std::uint64_t member) const {
  const std::uint64_t leaf =
      combine(combine(key_, static_cast<std::uint64_t>(role)), member);
  std::seed_seq seq{static_cast<std::uint32_t>(leaf),
                    static_cast<std::uint32_t>(leaf >> 32),
                    static_cast<std::uint32_t>(key_),
                    static_cast<std::uint32_t>(key_ >> 32)};
  return Engine(seq);
}

Eigen::VectorXd standard_normal(RandomStreams::Engine& engine, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(engine);
  return z;
}

}  // namespace enkpf
