#include <numeric>

#include <benchmark/benchmark.h>

#include <ahc/active_cluster.hpp>
#include <ahc/hbm.hpp>
#include <ahc/spectral.hpp>

namespace {

ahc::HbmInstance instance(std::size_t n) {
  ahc::NoisyHbmSpec spec;
  spec.n = n;
  spec.shape = ahc::BalancedShape{3};
  spec.bands = ahc::even_level_bands(3);
  spec.sigma = 0.2;
  spec.seed = 1;
  return ahc::generate(spec);
}

std::vector<ahc::ObjectId> ids(std::size_t n) {
  std::vector<ahc::ObjectId> out(n);
  std::iota(out.begin(), out.end(), ahc::ObjectId{0});
  return out;
}

void BM_Fiedler(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ahc::Laplacian lap = ahc::laplacian(instance(n).similarities);
  for (auto _ : state) benchmark::DoNotOptimize(ahc::smallest_nonconstant_eigvec(lap));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fiedler)->RangeMultiplier(2)->Range(8, 512)->Complexity();

void BM_ActiveSpectral(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ahc::HbmInstance inst = instance(n);
  ahc::ActiveConfig cfg;
  cfg.s = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
  std::uint64_t queries = 0;
  for (auto _ : state) {
    auto oracle = ahc::SimilarityOracle::from_matrix(inst.similarities);
    benchmark::DoNotOptimize(ahc::active_cluster(oracle, ids(n), cfg));
    queries = oracle.unique_pairs();
  }
  state.counters["queries"] = static_cast<double>(queries);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ActiveSpectral)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond)->Complexity();

void BM_HierSpectral(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ahc::HbmInstance inst = instance(n);
  for (auto _ : state) {
    auto oracle = ahc::SimilarityOracle::from_matrix(inst.similarities);
    benchmark::DoNotOptimize(ahc::nonactive_hierarchical(oracle, ids(n), 2, ahc::FlatClusterer::spectral()));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HierSpectral)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_OracleQuery(benchmark::State& state) {
  const ahc::HbmInstance inst = instance(1024);
  auto oracle = ahc::SimilarityOracle::from_matrix(inst.similarities);
  ahc::ObjectId i = 0, j = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.query(i, j));
    j = (j + 7) % 1024;
    i = (i + 3) % 1024;
  }
}
BENCHMARK(BM_OracleQuery);

}  // namespace

BENCHMARK_MAIN();
