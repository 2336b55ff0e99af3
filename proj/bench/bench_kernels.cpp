#include <benchmark/benchmark.h>

#include "potts/coupling.hpp"
#include "potts/model.hpp"
#include "potts/pseudolikelihood.hpp"
#include "potts/sampler.hpp"
#include "potts/serial_reference.hpp"

namespace {

using namespace potts;

struct Instance {
  CouplingMatrix a;
  Configuration x;
  PottsParams params{0.8, {0.3, -0.2}, 3};
};

Instance make(int n) {
  Instance in{erdos_renyi(n, 20.0 / n, 1), Configuration(static_cast<std::size_t>(n))};
  Rng rng(2);
  for (int& c : in.x) c = rng.uniform_int(3);
  return in;
}

void BM_LocalFieldsSerial(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::local_fields(in.a, in.x, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LocalFieldsParallel(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(local_fields(in.a, in.x, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::evaluate(in.a, in.x, in.params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(in.a, in.x, in.params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GibbsSweep(benchmark::State& state) {
  const Instance in = make(static_cast<int>(state.range(0)));
  GibbsChain chain(in.a, in.params, 3);
  for (auto _ : state) chain.sweep();
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LocalFieldsSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_LocalFieldsParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_EvaluateSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_EvaluateParallel)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_GibbsSweep)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
