#include <benchmark/benchmark.h>

#include <omp.h>

#include <racecurve/design.hpp>
#include <racecurve/power.hpp>

using namespace racecurve;

namespace {

PowerScenario power_scenario()
{
    PowerScenario s;
    s.params = {0.8, 0.2, 1.5};
    s.k = 6;
    s.n_values = {1200};
    s.replicates = 64;
    s.seed = 42;
    return s;
}

void BM_PowerSerial(benchmark::State& state)
{
    const auto s = power_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(estimate_power_serial(s));
}

void BM_PowerOpenMP(benchmark::State& state)
{
    omp_set_num_threads(static_cast<int>(state.range(0)));
    const auto s = power_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(estimate_power(s));
}

void BM_DesignSweepSerial(benchmark::State& state)
{
    const auto scenarios = standard_scenarios();
    const auto ks = standard_k_values();
    for (auto _ : state) benchmark::DoNotOptimize(sweep_scenarios_serial(scenarios, ks, 1200));
}

void BM_DesignSweepOpenMP(benchmark::State& state)
{
    omp_set_num_threads(static_cast<int>(state.range(0)));
    const auto scenarios = standard_scenarios();
    const auto ks = standard_k_values();
    for (auto _ : state) benchmark::DoNotOptimize(sweep_scenarios(scenarios, ks, 1200));
}

}  // namespace

BENCHMARK(BM_PowerSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DesignSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DesignSweepOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
