// OpenMP replication loop vs the serial reference, and the pattern-grouped
// likelihood vs the row-by-row one.

#include <benchmark/benchmark.h>

#include "bre/fiml.hpp"
#include "bre/missing_design.hpp"
#include "bre/sim_harness.hpp"

namespace {

bre::ConditionSpec bench_spec()
{
    bre::ConditionSpec s;
    s.rho = 0.3;
    s.n = 300;
    s.replications = 16;
    s.population = bre::PopulationParams::defaults(0.3);
    s.master_seed = 99;
    return s;
}

void BM_ConditionSerial(benchmark::State& state)
{
    const auto spec = bench_spec();
    for (auto _ : state) benchmark::DoNotOptimize(bre::run_condition_serial(spec));
}
BENCHMARK(BM_ConditionSerial)->Unit(benchmark::kMillisecond);

void BM_ConditionOpenMP(benchmark::State& state)
{
    const auto spec = bench_spec();
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bre::run_condition(spec, workers));
}
BENCHMARK(BM_ConditionOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

bre::DataMatrix masked_data(std::size_t n)
{
    bre::RandomStream rng(7);
    const auto full = bre::generate_dataset(bre::build_moments(bre::PopulationParams::defaults(0.3)), n, rng);
    const auto design = bre::swmd6();
    return bre::apply_design(full, bre::assign_groups(n, design, rng), design);
}

void BM_PatternLoglik(benchmark::State& state)
{
    const auto data = masked_data(static_cast<std::size_t>(state.range(0)));
    const auto stats = bre::group_patterns(data);
    const auto theta = bre::pack(bre::PopulationParams::defaults(0.3));
    Eigen::VectorXd grad;
    for (auto _ : state) benchmark::DoNotOptimize(bre::pattern_loglik(theta, stats, &grad));
}
BENCHMARK(BM_PatternLoglik)->Arg(500)->Arg(5000);

void BM_CasewiseLoglik(benchmark::State& state)
{
    const auto data = masked_data(static_cast<std::size_t>(state.range(0)));
    const auto theta = bre::pack(bre::PopulationParams::defaults(0.3));
    for (auto _ : state) benchmark::DoNotOptimize(bre::casewise_loglik(theta, data));
}
BENCHMARK(BM_CasewiseLoglik)->Arg(500)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
