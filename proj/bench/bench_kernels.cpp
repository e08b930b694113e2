// Serial reference vs OpenMP kernels, and a whole factorization under each policy.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hrbr/engine.hpp"
#include "hrbr/kernels.hpp"

using namespace hrbr;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(g() >> 11) * 0x1p-53 - 0.5;
  return v;
}

template <bool Parallel>
void BM_RowUpdates(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = rows;
  auto a = noise(rows * cols, 1);
  const auto src = noise(cols, 2);
  std::vector<kernels::RowUpdate> ups;
  for (std::size_t i = 0; i < rows; ++i) ups.push_back({a.data() + i * cols, src.data(), cols, 1e-9});
  for (auto _ : state) {
    if constexpr (Parallel) kernels::apply_row_updates_parallel(ups);
    else kernels::apply_row_updates_serial(ups);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows * cols));
}

template <bool Parallel>
void BM_BlockSum(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t cols = rows;
  const auto t0 = noise(rows * cols, 3), t1 = noise(rows * cols, 4), t2 = noise(rows * cols, 5);
  const std::vector<double> w(cols, 1.0);
  const std::vector<kernels::SumTerm> terms{{t0.data(), cols, w.data()},
                                            {t1.data(), cols, w.data()},
                                            {t2.data(), cols, w.data()}};
  std::vector<double> out(rows * cols);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::weighted_block_sum_parallel(terms, rows, cols, out.data());
    else kernels::weighted_block_sum_serial(terms, rows, cols, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Argmax(benchmark::State& state) {
  const auto v = noise(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::argmax_abs_parallel(v) : kernels::argmax_abs_serial(v));
  }
}

void BM_Solve(benchmark::State& state, ExecPolicy policy) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = DenseMatrix::random(n, n, 7);
  const auto b = DenseMatrix::random(n, 1, 8);
  EngineConfig cfg;
  cfg.grid = {2, 2, 32, 32, 1};
  cfg.policy = policy;
  for (auto _ : state) benchmark::DoNotOptimize(run(a, b, cfg).scaled_residual);
}

}  // namespace

BENCHMARK(BM_RowUpdates<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_RowUpdates<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_BlockSum<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_BlockSum<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Argmax<false>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Argmax<true>)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(BM_Solve, serial, ExecPolicy::Serial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, parallel, ExecPolicy::Parallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
