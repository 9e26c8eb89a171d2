#include <benchmark/benchmark.h>

#include <random>

#include "enkpf/enkf.hpp"
#include "enkpf/enkpf.hpp"
#include "enkpf/kdv.hpp"
#include "enkpf/lorenz96.hpp"
#include "enkpf/scoring.hpp"

using namespace enkpf;

namespace {

Eigen::MatrixXd normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = z(rng);
  return m;
}

LinearGaussianObservation odd_components(Eigen::Index q) {
  std::vector<Eigen::Index> comps;
  for (Eigen::Index i = 0; i < q; i += 2) comps.push_back(i);
  const auto r = static_cast<Eigen::Index>(comps.size());
  return LinearGaussianObservation::diagonal(comps, q, 0.5, normals(r, 1, 9).col(0));
}

void BM_Lorenz96Cycle(benchmark::State& state) {
  const Eigen::MatrixXd x = normals(40, state.range(0), 1);
  const Lorenz96Config cfg;
  for (auto _ : state) benchmark::DoNotOptimize(lorenz96_propagate(x, cfg, cfg.lead_time));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Lorenz96Cycle)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KdVCycle(benchmark::State& state) {
  const Ensemble ens = kdv_initial(state.range(0));
  const KdVConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kdv_propagate(ens, cfg, cfg.lead_time));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdVCycle)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EnkfUpdate(benchmark::State& state) {
  const Ensemble ens(normals(40, state.range(0), 2));
  const auto obs = odd_components(40);
  const auto taper = TaperSpec::gaspari_cohn(10.0, Topology::Ring);
  const RandomStreams streams(3);
  for (auto _ : state) benchmark::DoNotOptimize(enkf_update(ens, obs, taper, streams));
}
BENCHMARK(BM_EnkfUpdate)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_EnkpfUpdate(benchmark::State& state, GammaPolicy policy) {
  const Ensemble ens(normals(40, state.range(0), 2));
  const auto obs = odd_components(40);
  const auto taper = TaperSpec::gaspari_cohn(10.0, Topology::Ring);
  const RandomStreams streams(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enkpf_update(ens, obs, policy, taper, streams));
  }
}
BENCHMARK_CAPTURE(BM_EnkpfUpdate, fixed, GammaPolicy::fixed(0.5))
    ->Arg(400)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EnkpfUpdate, adaptive_ess,
                  GammaPolicy::adaptive(GammaMode::AdaptiveEss, 0.25, 0.5))
    ->Arg(400)
    ->Unit(benchmark::kMillisecond);

void BM_Crps(benchmark::State& state) {
  const Eigen::MatrixXd x = normals(1, state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(crps(x, 0, 0.1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Crps)->RangeMultiplier(4)->Range(16, 16384)->Complexity(benchmark::oNLogN);

}  // namespace
BENCHMARK_MAIN();
