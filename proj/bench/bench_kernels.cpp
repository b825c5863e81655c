// Serial reference vs OpenMP element kernels on large grids.
#include <benchmark/benchmark.h>

#include <cmath>

#include "supmin/energy.hpp"
#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"

namespace {

using namespace supmin;

LagrangianModel bench_model(int n) {
  DataAssimilationParams p;
  p.K = Mat::Identity(1, n);
  p.k = SampledSignal({0.0, 0.5, 1.0}, {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0),
                                        Vec::Constant(1, 0.0)});
  p.V.A = -0.5 * Mat::Identity(n, n);
  p.V.c = SampledSignal::constant(Vec::Ones(n));
  return LagrangianModel::data_assimilation(std::move(p));
}

Path bench_path(int elements, int n) {
  const Grid g = Grid::uniform(0.0, 1.0, elements);
  NodeMatrix v(g.num_nodes(), n);
  for (int i = 0; i < g.num_nodes(); ++i) {
    for (int k = 0; k < n; ++k) v(i, k) = std::sin(3.0 * g.node(i) + k);
  }
  return Path(g, std::move(v));
}

template <Exec kExec>
void BM_PowerObjective(benchmark::State& state) {
  const int elements = static_cast<int>(state.range(0));
  const auto model = bench_model(3);
  const Path path = bench_path(elements, 3);
  const Subinterval whole = Subinterval::whole(path.grid());
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_objective(model, path, 64, whole, kExec));
  }
  state.SetItemsProcessed(state.iterations() * elements);
}

template <Exec kExec>
void BM_SupEnergy(benchmark::State& state) {
  const int elements = static_cast<int>(state.range(0));
  const auto model = bench_model(3);
  const Path path = bench_path(elements, 3);
  const Subinterval whole = Subinterval::whole(path.grid());
  for (auto _ : state) {
    benchmark::DoNotOptimize(sup_energy(model, path, whole, kExec));
  }
  state.SetItemsProcessed(state.iterations() * elements);
}

}  // namespace

BENCHMARK(BM_PowerObjective<Exec::kSerial>)->RangeMultiplier(8)->Range(512, 1 << 18);
BENCHMARK(BM_PowerObjective<Exec::kParallel>)->RangeMultiplier(8)->Range(512, 1 << 18);
BENCHMARK(BM_SupEnergy<Exec::kSerial>)->RangeMultiplier(8)->Range(512, 1 << 18);
BENCHMARK(BM_SupEnergy<Exec::kParallel>)->RangeMultiplier(8)->Range(512, 1 << 18);

BENCHMARK_MAIN();
