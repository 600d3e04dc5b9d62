#include <benchmark/benchmark.h>

#include <vector>

#include "beamstab/dynamics.hpp"
#include "beamstab/kernels.hpp"
#include "beamstab/resolvent.hpp"
#include "reference.hpp"

using namespace beamstab;
using beamstab::testing::ref1;

static void BM_Assemble(benchmark::State& state) {
  MemoryConfig cfg;
  if (state.range(0) > 0) {
    cfg.scheme = MemoryScheme::SgridGalerkin;
    cfg.nodes = static_cast<int>(state.range(0));
  }
  ModalAssembler assembler(ref1(ModelTag::BGP), cfg);
  int n = 1;
  for (auto _ : state) benchmark::DoNotOptimize(assembler.assemble(n++ % 512 + 1));
}
BENCHMARK(BM_Assemble)->Arg(0)->Arg(64)->Arg(256);

static void BM_ResolventNorm(benchmark::State& state) {
  auto sg = similar_generator(assemble(ref1(ModelTag::BMC), 100));
  double lam = 90.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_norm(sg, lam));
    lam += 1e-3;
  }
}
BENCHMARK(BM_ResolventNorm);

static void BM_FilonTransform(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  std::vector<double> s(count), mu(count);
  for (int i = 0; i < count; ++i) {
    s[i] = 20.0 * i / (count - 1);
    mu[i] = std::exp(-s[i]);
  }
  auto kernel = MemoryKernel::tabulated(s, mu, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fourier_mu(kernel, 1234.5));
}
BENCHMARK(BM_FilonTransform)->Arg(1000)->Arg(10000);

static void BM_SemiuniformNorm(benchmark::State& state) {
  const double ts[] = {100.0, 1000.0};
  for (auto _ : state) benchmark::DoNotOptimize(semiuniform_norm(ref1(ModelTag::BMC), ts, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SemiuniformNorm)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
