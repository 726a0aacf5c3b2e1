#include <benchmark/benchmark.h>

#include "iooracle/bounds.hpp"
#include "iooracle/kernels.hpp"
#include "iooracle/lattice.hpp"
#include "iooracle/machine.hpp"
#include "iooracle/reference.hpp"

using namespace iooracle;

static void BM_flop(benchmark::State& state) {
  DamMachine m(MachineConfig{64, Mode::explicit_io, false});
  const Address a = m.allocate(3);
  m.read_block(a, 3);
  const Operand x = Operand::slow(a), y = Operand::slow(a + 1), z = Operand::slow(a + 2);
  for (auto _ : state) m.flop(OpLabel{0, 0, 0, KernelTag::matmul}, {x, y, z}, z, true);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_flop);

static void BM_matmul_blocked(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::uint64_t M = 768;
  reference::Rng rng(1);
  const Matrix a = reference::random_uniform(n, n, rng), b = reference::random_uniform(n, n, rng);
  for (auto _ : state) {
    DamMachine m(MachineConfig{M, Mode::explicit_io, false});
    const auto C = kernels::matmul_blocked(m, store_matrix(m, a), store_matrix(m, b), kernels::auto_block(M));
    benchmark::DoNotOptimize(C);
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_matmul_blocked)->Arg(32)->Arg(64)->Arg(128);

static void BM_matmul_lru(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  reference::Rng rng(2);
  const Matrix a = reference::random_uniform(n, n, rng), b = reference::random_uniform(n, n, rng);
  for (auto _ : state) {
    DamMachine m(MachineConfig{256, Mode::lru, false});
    const auto C = kernels::matmul_naive(m, store_matrix(m, a), store_matrix(m, b));
    benchmark::DoNotOptimize(C);
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_matmul_lru)->Arg(32)->Arg(64);

static void BM_segment_partition(benchmark::State& state) {
  const std::size_t n = 64;
  const std::uint64_t M = 768;
  reference::Rng rng(3);
  DamMachine m(MachineConfig{M, Mode::explicit_io, true});
  kernels::matmul_blocked(m, store_matrix(m, reference::random_uniform(n, n, rng)),
                          store_matrix(m, reference::random_uniform(n, n, rng)), kernels::auto_block(M));
  const Trace trace = m.take_trace();
  for (auto _ : state) benchmark::DoNotOptimize(lattice::segment_partition(trace, M));
  state.SetItemsProcessed(state.iterations() * trace.size());
}
BENCHMARK(BM_segment_partition);

static void BM_bounds(benchmark::State& state) {
  double G = 1e6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bounds::general_report(G, 768, 3 * 64.0 * 64));
    G += 1;
  }
}
BENCHMARK(BM_bounds);
BENCHMARK_MAIN();
