#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "osmon/cox.hpp"
#include "osmon/guideline.hpp"

namespace osmon {

// Exponential survival trial: uniform accrual, k:1 allocation, exponential
// death and dropout hazards.
struct TrialScenario {
    int n_patients = 0;
    double accrual_months = 0.0;
    AllocationRatio k{};
    double control_median_os_months = 0.0;
    HazardRatio true_os_hr{1.0};
    double annual_dropout_prob = 0.0;  // in [0, 1)
    std::uint64_t rng_seed = 0;

    // Throws InputError naming the offending field.
    void validate() const;

    double control_hazard() const;   // ln 2 / median, per month
    double test_hazard() const;      // control_hazard * true_os_hr
    double dropout_hazard() const;   // -ln(1 - annual_dropout_prob) / 12, per month
    int test_arm_size() const;       // round(n * k / (k + 1))
};

struct PatientRecord {
    double entry_time;    // months from study start
    Arm arm;
    double event_time;    // latent death time, months from entry
    double dropout_time;  // months from entry; +inf without dropout
};

struct AnalysisSnapshot {
    double cutoff_months = 0.0;
    std::vector<SurvivalRecord> records;  // patients entered by the cutoff
    int deaths = 0;
};

// Snapshots for the reachable prefix of the plan; a replication is flagged
// when fewer deaths occur in total than a milestone requires.
struct SimulatedTrial {
    std::vector<AnalysisSnapshot> snapshots;
    int total_deaths = 0;

    bool reachable(std::size_t milestone_count) const noexcept {
        return snapshots.size() == milestone_count;
    }
};

// Expected number of deaths by `calendar_time` months after study start.
double expected_deaths(const TrialScenario& scenario, double calendar_time);

// Limit of expected_deaths as calendar time grows without bound.
double death_ceiling(const TrialScenario& scenario);

// Calendar time at which expected_deaths reaches `target_deaths`.
// Throws DomainError when the target is at or beyond death_ceiling.
double calendar_time_for_deaths(const TrialScenario& scenario, int target_deaths);
double calendar_time_for_deaths(const TrialScenario& scenario, double target_deaths);

// Control-arm median OS (months) at which expected_deaths(calendar_time)
// equals target_deaths, other scenario fields held fixed. Throws DomainError
// when no median achieves the target.
double calibrate_control_median(TrialScenario scenario, double calendar_time, double target_deaths);

std::vector<PatientRecord> generate_patients(const TrialScenario& scenario, std::mt19937_64& rng);

// Data cut at the calendar time of the `target_deaths`-th death.
std::optional<AnalysisSnapshot> snapshot_at_deaths(std::span<const PatientRecord> patients,
                                                   int target_deaths);

// Data cut at a fixed calendar time.
AnalysisSnapshot snapshot_at_time(std::span<const PatientRecord> patients, double cutoff_months);

// One replication seeded from scenario.rng_seed.
SimulatedTrial simulate_trial(const TrialScenario& scenario, const AnalysisPlan& plan);

EstimateResult estimate_log_hr(const AnalysisSnapshot& snapshot);

// Seed of replication `rep` under master seed `master`; independent of
// scheduling.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept;

struct EmpiricalMilestone {
    std::string label;
    int deaths = 0;
    HazardRatio threshold{1.0};
    double empirical_prob = 0.0;   // fraction of replications meeting the threshold
    double mc_se = 0.0;            // sqrt(p(1-p)/reps)
    double analytic_prob = 0.0;    // asymptotic positivity probability
    int met = 0;
    int divergent = 0;             // fits that did not converge (counted as not met)
    int unreachable = 0;           // replications that never reached the target

    // |empirical - analytic| <= n_se * mc_se
    bool agrees(double n_se = 3.0) const noexcept;
};

struct EmpiricalOC {
    int reps = 0;
    std::uint64_t seed = 0;
    HazardRatio true_hr{1.0};
    std::vector<EmpiricalMilestone> milestones;

    bool all_agree(double n_se = 3.0) const noexcept;
};

struct EmpiricalOcOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Replication-level rows written here as CSV when set.
    std::ostream* raw_csv = nullptr;
};

// Monte Carlo positivity probabilities for each milestone of the guideline
// built from `params` under `scenario`. Requires reps >= 100 and each
// milestone reachable in at least 99% of replications by the normal
// approximation to the total death count; throws DomainError otherwise and
// BudgetExceeded past the deadline.
EmpiricalOC empirical_oc(const TrialScenario& scenario, const GuidelineParams& params,
                         const AnalysisPlan& plan, int reps, const EmpiricalOcOptions& options = {});

}  // namespace osmon
