#include <benchmark/benchmark.h>

#include <vector>

#include "mcvlab/engine.hpp"
#include "mcvlab/oracles.hpp"
#include "mcvlab/rng.hpp"

using namespace mcvlab;

namespace {

const std::vector<Observable> kFirst{Observable::first_moment()};

void BM_DriverFill(benchmark::State& state) {
  const int columns = static_cast<int>(state.range(0));
  const TimeGrid grid = make_time_grid(1.0, 50);
  DriverBlock block;
  std::uint64_t run = 0;
  for (auto _ : state) {
    fill_driver_columns(derive_stream(1, run++), grid, columns, block);
    benchmark::DoNotOptimize(block.increments.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(columns) * 51);
}
BENCHMARK(BM_DriverFill)->Arg(40)->Arg(160)->Arg(640);

void BM_InverseNormalCdf(benchmark::State& state) {
  double p = 0.0001;
  double sink = 0.0;
  for (auto _ : state) {
    sink += inverse_normal_cdf(p);
    p += 0.0009993;
    if (p >= 1.0) p -= 0.9993;
  }
  benchmark::DoNotOptimize(sink);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_InverseNormalCdf);

template <class Model>
void run_triple(benchmark::State& state, const Model& model) {
  const int n = static_cast<int>(state.range(0));
  const TimeGrid grid = make_time_grid(1.0, 50);
  std::uint64_t run = 0;
  DriverBlock block;
  for (auto _ : state) {
    fill_driver_columns(derive_stream(2, run++), grid, 2 * n, block);
    const RunOutput out = simulate_run(model, grid, n, block, kFirst);
    benchmark::DoNotOptimize(out.observables[0].antithetic_diff);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(4 * n) * grid.steps);
}

void BM_OuTriple(benchmark::State& state) { run_triple(state, GeneralizedOu{}); }
BENCHMARK(BM_OuTriple)->Arg(20)->Arg(160);

void BM_RotatorTriple(benchmark::State& state) { run_triple(state, PlaneRotator{}); }
BENCHMARK(BM_RotatorTriple)->Arg(20);

void BM_PolynomialTriple(benchmark::State& state) { run_triple(state, PolynomialDrift{}); }
BENCHMARK(BM_PolynomialTriple)->Arg(20);

void BM_BurgersTriple(benchmark::State& state) { run_triple(state, ViscousBurgers{}); }
BENCHMARK(BM_BurgersTriple)->Arg(20)->Arg(160);

void BM_BurgersKernel(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  ParticleEnsemble ens;
  ens.states.resize(n);
  const RunStream stream = derive_stream(3, 0);
  for (std::size_t i = 0; i < n; ++i) ens.states[i] = stream.normal_at(0, i);
  for (auto _ : state) {
    const InteractionValue iv = interaction(ViscousBurgers{}, ens);
    benchmark::DoNotOptimize(iv.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_BurgersKernel)->Arg(40)->Arg(640);

}  // namespace

BENCHMARK_MAIN();
