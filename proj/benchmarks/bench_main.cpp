#include <benchmark/benchmark.h>

#include "opgrowth/dynamics.hpp"
#include "opgrowth/lanczos.hpp"
#include "opgrowth/models.hpp"
#include "opgrowth/spin_chain.hpp"

using namespace opgrowth;

static void BM_LanczosRandom(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  ModelData m = random_ensemble(dim, StructureSpec::flat(), 400.0, 1);
  ThermalEnsemble ens(m.spectrum, 1.0);
  LanczosOptions o;
  o.precision = state.range(1) ? Precision::extended : Precision::standard;
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_run(m.op, m.spectrum, ens, 40, o));
}
BENCHMARK(BM_LanczosRandom)->Args({500, 0})->Args({2000, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);

static void BM_PropagateChain(benchmark::State& state) {
  LanczosSequence b;
  for (long n = 1; n <= state.range(0); ++n) b.coefficients.push_back(0.5 * n);
  std::vector<double> t;
  for (int i = 0; i <= 40; ++i) t.push_back(0.1 * i);  // alpha t <= 2 stays inside the chain
  ChainOptions o;
  o.method = state.range(1) ? ChainMethod::chebyshev : ChainMethod::eigen;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_chain(b, t, o));
}
BENCHMARK(BM_PropagateChain)->Args({400, 0})->Args({400, 1})->Args({1500, 0})->Args({1500, 1})
    ->Unit(benchmark::kMillisecond);

static void BM_ChainDiagonalize(benchmark::State& state) {
  ChainConfig c;
  c.sites = static_cast<int>(state.range(0));
  c.j2 = 1.0;
  const Matrix h = build_hamiltonian(c);
  const Matrix b = flip_flop_operator(c);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize_to_eigenbasis(h, b));
}
BENCHMARK(BM_ChainDiagonalize)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_StructureFunction(benchmark::State& state) {
  ChainConfig c;
  c.sites = 12;
  c.j2 = 1.0;
  ChainEigenbasis eb = diagonalize_to_eigenbasis(build_hamiltonian(c), flip_flop_operator(c));
  StructureOptions o;
  o.ebar_lo = -0.5;
  o.ebar_hi = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(extract_structure_function(eb.op, eb.spectrum, o));
}
BENCHMARK(BM_StructureFunction)->Unit(benchmark::kMillisecond);

static void BM_MomentsRoundTrip(benchmark::State& state) {
  LanczosSequence b;
  for (int n = 1; n <= state.range(0); ++n) b.coefficients.push_back(1.0 * n);
  for (auto _ : state)
    benchmark::DoNotOptimize(lanczos_from_moments(moments_from_lanczos(b, std::nullopt, Precision::extended)));
}
BENCHMARK(BM_MomentsRoundTrip)->Arg(12)->Arg(30);
BENCHMARK_MAIN();
