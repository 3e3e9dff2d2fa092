#include <benchmark/benchmark.h>

#include <starscatter/fundamental.hpp>
#include <starscatter/jost.hpp>
#include <starscatter/oracle.hpp>
#include <starscatter/scattering.hpp>

#include "test_networks.hpp"

namespace ss = starscatter;

static void BM_JostAtOrigin(benchmark::State &state)
{
  const ss::PotentialFn v = ss::testing::Bump(0.4, 0.8, 0.7);
  const auto k = static_cast<double>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::JostAtOrigin(v, k));
  }
}
BENCHMARK(BM_JostAtOrigin)->Arg(10)->Arg(50)->Arg(200);

static void BM_FundamentalAt(benchmark::State &state)
{
  const ss::PotentialFn v = ss::testing::Bump(0.5, 0.5, 0.4);
  const auto k = static_cast<double>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::FundamentalAt(v, 1.0, 0.1, k));
  }
}
BENCHMARK(BM_FundamentalAt)->Arg(10)->Arg(50)->Arg(200);

static void BM_SolveKernel(benchmark::State &state)
{
  const ss::PotentialFn v = ss::testing::Bump(0.5, 0.5, 0.4);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::SolveKernel(v, 1.0));
  }
}
BENCHMARK(BM_SolveKernel)->Unit(benchmark::kMillisecond);

static void BM_SolveScattering(benchmark::State &state)
{
  const ss::StarNetwork net = ss::testing::SmoothM2N2();
  const auto k = static_cast<double>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::SolveScattering(net, k));
  }
}
BENCHMARK(BM_SolveScattering)->Arg(20)->Arg(100)->Arg(160)->Unit(benchmark::kMicrosecond);

static void BM_Reflectogram(benchmark::State &state)
{
  const ss::StarNetwork net = ss::testing::SmoothM2N2();
  std::vector<double> grid;
  for (int i = 0; i < 200; i++)
  {
    grid.push_back(60.0 + 0.5 * i);
  }
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::Reflectogram(net, grid, {}, threads));
  }
}
BENCHMARK(BM_Reflectogram)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_OracleSolve(benchmark::State &state)
{
  const ss::StarNetwork net = ss::testing::SmoothM2N2();
  const double dx = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(ss::OracleSolve(net, 20.0, dx, 2.0));
  }
}
BENCHMARK(BM_OracleSolve)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

// The packaged benchmark_main archive is LTO bytecode from another compiler release.
BENCHMARK_MAIN();
