#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "osmon/guideline.hpp"
#include "osmon/normal.hpp"
#include "osmon/trial_sim.hpp"

using namespace osmon;

namespace {

GuidelineParams table3_params() {
    return {HazardRatio(1.3), HazardRatio(0.8), Probability(0.025), Probability(0.1), AllocationRatio(1.0)};
}

TrialScenario scenario() {
    TrialScenario s;
    s.n_patients = 300;
    s.accrual_months = 24;
    s.control_median_os_months = 60;
    s.true_os_hr = HazardRatio(0.7);
    s.annual_dropout_prob = 0.01;
    s.rng_seed = 1;
    return s;
}

void BM_NormalQuantile(benchmark::State& state) {
    double p = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(std_normal_quantile(p));
        p = p < 0.998 ? p + 0.001 : 0.001;
    }
}
BENCHMARK(BM_NormalQuantile);

void BM_BuildGuideline(benchmark::State& state) {
    const auto params = table3_params();
    const std::vector<int> deaths{60, 89, 110, 131, 178};
    const auto plan = AnalysisPlan::from_deaths(deaths);
    const std::vector<HazardRatio> probes{HazardRatio(0.95), HazardRatio(1.0), HazardRatio(1.3)};
    for (auto _ : state) benchmark::DoNotOptimize(build_guideline(params, plan, probes));
}
BENCHMARK(BM_BuildGuideline);

void BM_EstimateLogHr(benchmark::State& state) {
    auto s = scenario();
    s.n_patients = static_cast<int>(state.range(0));
    std::mt19937_64 rng(7);
    const auto patients = generate_patients(s, rng);
    const auto snap = snapshot_at_deaths(patients, s.n_patients / 4);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_log_hr(*snap));
}
BENCHMARK(BM_EstimateLogHr)->Arg(100)->Arg(300)->Arg(3000);

void BM_SimulateReplication(benchmark::State& state) {
    auto s = scenario();
    const std::vector<int> deaths{28, 42, 70};
    const auto plan = AnalysisPlan::from_deaths(deaths);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        s.rng_seed = replication_seed(1, rep++);
        const auto trial = simulate_trial(s, plan);
        for (const auto& snap : trial.snapshots) benchmark::DoNotOptimize(estimate_log_hr(snap));
    }
}
BENCHMARK(BM_SimulateReplication);

}  // namespace

BENCHMARK_MAIN();
