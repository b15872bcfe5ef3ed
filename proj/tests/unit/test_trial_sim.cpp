#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "../oracles/patient_mc.hpp"
#include "../support/configs.hpp"
#include "osmon/trial_sim.hpp"

using namespace osmon;

namespace {

TrialScenario scenario(int n, double accrual, double median, double hr, double dropout,
                       std::uint64_t seed = 1, double k = 1.0) {
    TrialScenario s;
    s.n_patients = n;
    s.accrual_months = accrual;
    s.k = AllocationRatio(k);
    s.control_median_os_months = median;
    s.true_os_hr = HazardRatio(hr);
    s.annual_dropout_prob = dropout;
    s.rng_seed = seed;
    return s;
}

AnalysisPlan plan_of(std::vector<int> deaths) { return AnalysisPlan::from_deaths(deaths); }

}  // namespace

TEST_CASE("expected_deaths boundary cases") {
    const auto s = scenario(500, 24, 60, 0.7, 0.05);
    CHECK(expected_deaths(s, 0.0) == 0.0);

    const auto all_die = scenario(400, 12, 6, 1.0, 0.0);
    CHECK(std::abs(expected_deaths(all_die, 2000.0) - 400.0) < 1e-9);
    CHECK(std::abs(death_ceiling(all_die) - 400.0) < 1e-9);
    CHECK_THROWS_AS(expected_deaths(s, -1.0), InputError);
}

TEST_CASE("expected_deaths matches a million-patient simulation") {
    const auto s = scenario(1'000'000, 27, 60, 0.7, 0.01);
    const oracle::ExpScenario o{1'000'000, 27, 1.0, 60, 0.7, 0.01};
    const double simulated = oracle::simulated_deaths(o, 55.0, 424242);
    const double analytic = expected_deaths(s, 55.0);
    CHECK(std::abs(analytic - simulated) / simulated < 0.005);
}

TEST_CASE("expected_deaths is monotone and continuous in calendar time") {
    const auto s = scenario(300, 24, 40, 0.8, 0.1, 1, 2.0);
    double prev = 0.0;
    for (double t = 0.05; t < 200.0; t += 0.05) {
        const double d = expected_deaths(s, t);
        CHECK(d >= prev);
        CHECK(d - prev < 1.0);
        prev = d;
    }
    CHECK(prev < death_ceiling(s));
    // No jump across the end of accrual.
    CHECK(std::abs(expected_deaths(s, 24.0 + 1e-9) - expected_deaths(s, 24.0 - 1e-9)) < 1e-6);
}

TEST_CASE("calendar_time_for_deaths inverts expected_deaths") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = scenario(50 + static_cast<int>(2000 * u(rng)), 6 + 40 * u(rng), 6 + 100 * u(rng),
                                0.4 + 1.2 * u(rng), 0.3 * u(rng), 1, std::exp(u(rng) - 0.5));
        const double t = 1.0 + 150.0 * u(rng);
        const double target = expected_deaths(s, t);
        if (target < 1e-3) continue;
        CHECK(std::abs(calendar_time_for_deaths(s, target) - t) < 0.02);
    }
}

TEST_CASE("calendar_time_for_deaths errors") {
    const auto heavy = scenario(100, 12, 60, 1.0, 0.9);
    CHECK_THROWS_AS(calendar_time_for_deaths(heavy, 90), DomainError);
    CHECK_THROWS_AS(calendar_time_for_deaths(heavy, static_cast<int>(std::ceil(death_ceiling(heavy)))),
                    DomainError);
    CHECK_THROWS_AS(calendar_time_for_deaths(heavy, 0), InputError);
}

TEST_CASE("calibrated control median places 22 deaths at 55 months") {
    auto s = scenario(108, 27, 120, 0.7, 0.01);
    s.control_median_os_months = calibrate_control_median(s, 55.0, 22.0);
    CHECK(std::abs(expected_deaths(s, 55.0) - 22.0) < 1e-6);
    CHECK(std::abs(calendar_time_for_deaths(s, 22) - 55.0) < 0.5);
    CHECK_THROWS_AS(calibrate_control_median(s, 55.0, 200.0), DomainError);
}

TEST_CASE("simulate_trial is deterministic in its seed") {
    const auto s = scenario(300, 24, 60, 0.8, 0.05, 99);
    const auto plan = plan_of({40, 80, 120});
    const auto a = simulate_trial(s, plan);
    const auto b = simulate_trial(s, plan);
    REQUIRE(a.snapshots.size() == 3);
    REQUIRE(b.snapshots.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.snapshots[i].deaths == plan.milestones()[i].deaths);
        CHECK(a.snapshots[i].cutoff_months == b.snapshots[i].cutoff_months);
        REQUIRE(a.snapshots[i].records.size() == b.snapshots[i].records.size());
        for (std::size_t j = 0; j < a.snapshots[i].records.size(); ++j) {
            CHECK(a.snapshots[i].records[j].time == b.snapshots[i].records[j].time);
            CHECK(a.snapshots[i].records[j].event == b.snapshots[i].records[j].event);
            CHECK(a.snapshots[i].records[j].arm == b.snapshots[i].records[j].arm);
        }
    }
    CHECK(a.total_deaths == b.total_deaths);
}

TEST_CASE("snapshots count deaths exactly and respect the cutoff") {
    const auto s = scenario(200, 24, 30, 0.9, 0.05, 5);
    std::mt19937_64 rng(s.rng_seed);
    const auto patients = generate_patients(s, rng);
    int test = 0;
    for (const auto& p : patients) test += p.arm == Arm::test;
    CHECK(test == 100);

    const auto snap = snapshot_at_deaths(patients, 50);
    REQUIRE(snap.has_value());
    int events = 0;
    for (const auto& r : snap->records) {
        events += r.event;
        CHECK(r.time >= 0.0);
    }
    CHECK(events == 50);
    CHECK(snap->deaths == 50);

    const auto by_time = snapshot_at_time(patients, snap->cutoff_months);
    CHECK(by_time.deaths == 50);
    CHECK_FALSE(snapshot_at_deaths(patients, 10'000).has_value());
}

TEST_CASE("near-certain dropout leaves every replication unreachable") {
    const auto plan = plan_of({20, 50});
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto s = scenario(100, 12, 60, 1.0, 1.0 - 1e-12, replication_seed(3, rep));
        const auto trial = simulate_trial(s, plan);
        CHECK_FALSE(trial.reachable(plan.size()));
    }
}

TEST_CASE("under the null, each arm holds half the deaths up to binomial noise") {
    const std::vector<int> targets{100, 400};
    const auto plan = plan_of(targets);
    int within = 0;
    int total = 0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        const auto s = scenario(100'000, 24, 60, 1.0, 0.01, replication_seed(77, rep));
        const auto trial = simulate_trial(s, plan);
        REQUIRE(trial.reachable(plan.size()));
        for (std::size_t i = 0; i < targets.size(); ++i) {
            int test_deaths = 0;
            for (const auto& r : trial.snapshots[i].records) test_deaths += r.event && r.arm == Arm::test;
            within += std::abs(test_deaths - targets[i] / 2.0) < 4.0 * std::sqrt(targets[i] / 4.0);
            ++total;
        }
    }
    CHECK(within >= 0.99 * total);
}

TEST_CASE("fixed-time death counts scatter around expected_deaths") {
    const auto s0 = scenario(600, 24, 40, 0.75, 0.05);
    const double t = 30.0;
    const double mean = expected_deaths(s0, t);
    const double sd = std::sqrt(mean * (1.0 - mean / s0.n_patients));
    int within = 0;
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        auto s = s0;
        s.rng_seed = replication_seed(8, rep);
        std::mt19937_64 rng(s.rng_seed);
        const auto snap = snapshot_at_time(generate_patients(s, rng), t);
        within += std::abs(snap.deaths - mean) < 4.0 * sd;
    }
    CHECK(within >= 990);
}

TEST_CASE("replication_seed is stable and spreads") {
    CHECK(replication_seed(1, 0) == replication_seed(1, 0));
    CHECK(replication_seed(1, 0) != replication_seed(1, 1));
    CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("empirical_oc is independent of the thread count") {
    const auto cfg = fixtures::table4();
    const auto s = scenario(300, 24, 60, 0.7, 0.01, 2024);
    EmpiricalOcOptions one;
    one.threads = 1;
    EmpiricalOcOptions four;
    four.threads = 4;
    const auto a = empirical_oc(s, cfg.params, cfg.plan(), 400, one);
    const auto b = empirical_oc(s, cfg.params, cfg.plan(), 400, four);
    REQUIRE(a.milestones.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.milestones[i].met == b.milestones[i].met);
        CHECK(a.milestones[i].divergent == b.milestones[i].divergent);
        CHECK(a.milestones[i].empirical_prob == b.milestones[i].empirical_prob);
        CHECK(std::abs(a.milestones[i].analytic_prob - 0.9) < 0.006);
    }
}

TEST_CASE("empirical positivity is one half when the true HR equals the threshold") {
    const auto cfg = fixtures::table3();
    const auto plan = plan_of({110, 178});
    const double thr = build_guideline(cfg.params, plan, {}).rows[0].threshold_hr.value();
    const auto s = scenario(1000, 24, 60, thr, 0.01, 31);
    const auto oc = empirical_oc(s, cfg.params, plan, 3000);
    CHECK(std::abs(oc.milestones[0].analytic_prob - 0.5) < 1e-12);
    CHECK(oc.milestones[0].agrees(3.0));
    CHECK(oc.milestones[0].divergent == 0);
}

TEST_CASE("empirical_oc errors") {
    const auto cfg = fixtures::table4();
    const auto s = scenario(300, 24, 60, 0.7, 0.01, 1);
    CHECK_THROWS_AS(empirical_oc(s, cfg.params, cfg.plan(), 99), InputError);

    const auto small = scenario(80, 24, 60, 0.7, 0.01, 1);
    CHECK_THROWS_AS(empirical_oc(small, cfg.params, cfg.plan(), 200), DomainError);

    EmpiricalOcOptions late;
    late.threads = 1;
    late.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_THROWS_AS(empirical_oc(s, cfg.params, cfg.plan(), 1000, late), BudgetExceeded);
}

TEST_CASE("empirical_oc writes replication rows") {
    const auto cfg = fixtures::table6();
    const auto s = scenario(108, 27, 120, 0.7, 0.01, 20240601);
    std::ostringstream csv;
    EmpiricalOcOptions opts;
    opts.raw_csv = &csv;
    const auto oc = empirical_oc(s, cfg.params, cfg.plan(), 100, opts);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "rep,milestone,cutoff_months,deaths,log_hr,std_err,converged,met_threshold");
    int rows = 0;
    int met = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.ends_with(",true")) ++met;
    }
    CHECK(rows == 200);
    CHECK(met == oc.milestones[0].met + oc.milestones[1].met);
}
