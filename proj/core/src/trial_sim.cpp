#include "osmon/trial_sim.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace osmon {

namespace {

constexpr double kReachabilityZ = 2.3263478740408408;  // PhiInv(0.99)
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ArmModel {
    double patients;
    double death_hazard;
};

std::array<ArmModel, 2> arm_models(const TrialScenario& s) {
    const double w_test = s.k.test_fraction();
    const double n = static_cast<double>(s.n_patients);
    return {{{n * (1.0 - w_test), s.control_hazard()}, {n * w_test, s.test_hazard()}}};
}

// Calendar death times of patients who die before dropping out, ascending.
struct DeathTime {
    double calendar;
    std::size_t patient;
};

std::vector<DeathTime> sorted_deaths(std::span<const PatientRecord> patients) {
    std::vector<DeathTime> deaths;
    for (std::size_t i = 0; i < patients.size(); ++i) {
        const auto& p = patients[i];
        if (p.event_time < p.dropout_time) deaths.push_back({p.entry_time + p.event_time, i});
    }
    std::sort(deaths.begin(), deaths.end(),
              [](const DeathTime& a, const DeathTime& b) { return a.calendar < b.calendar; });
    return deaths;
}

AnalysisSnapshot cut(std::span<const PatientRecord> patients, const std::vector<DeathTime>& deaths,
                     double cutoff) {
    std::vector<char> died(patients.size(), 0);
    for (const auto& d : deaths) {
        if (d.calendar > cutoff) break;
        died[d.patient] = 1;
    }
    AnalysisSnapshot snap;
    snap.cutoff_months = cutoff;
    snap.records.reserve(patients.size());
    for (std::size_t i = 0; i < patients.size(); ++i) {
        const auto& p = patients[i];
        if (p.entry_time > cutoff) continue;
        if (died[i]) {
            snap.records.push_back({p.event_time, true, p.arm});
            ++snap.deaths;
        } else {
            const double follow_up = std::max(0.0, std::min(p.dropout_time, cutoff - p.entry_time));
            snap.records.push_back({follow_up, false, p.arm});
        }
    }
    return snap;
}

std::optional<AnalysisSnapshot> cut_at_deaths(std::span<const PatientRecord> patients,
                                              const std::vector<DeathTime>& deaths, int target) {
    if (target < 1) throw InputError("death target must be at least 1");
    if (static_cast<std::size_t>(target) > deaths.size()) return std::nullopt;
    return cut(patients, deaths, deaths[static_cast<std::size_t>(target) - 1].calendar);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void TrialScenario::validate() const {
    if (n_patients < 2) throw InputError("n_patients must be at least 2", "scenario.n_patients");
    if (!(accrual_months > 0.0) || !std::isfinite(accrual_months)) {
        throw InputError("accrual_months must be positive", "scenario.accrual_months");
    }
    if (!(control_median_os_months > 0.0) || !std::isfinite(control_median_os_months)) {
        throw InputError("control_median_os_months must be positive",
                         "scenario.control_median_os_months");
    }
    if (!(annual_dropout_prob >= 0.0 && annual_dropout_prob < 1.0)) {
        throw InputError("annual_dropout_prob must lie in [0, 1)", "scenario.annual_dropout_prob");
    }
    const int n_test = test_arm_size();
    if (n_test < 1 || n_test >= n_patients) {
        throw InputError("allocation leaves an arm empty", "k");
    }
}

double TrialScenario::control_hazard() const { return std::log(2.0) / control_median_os_months; }

double TrialScenario::test_hazard() const { return control_hazard() * true_os_hr.value(); }

double TrialScenario::dropout_hazard() const { return -std::log1p(-annual_dropout_prob) / 12.0; }

int TrialScenario::test_arm_size() const {
    return static_cast<int>(std::lround(n_patients * k.test_fraction()));
}

double expected_deaths(const TrialScenario& scenario, double calendar_time) {
    scenario.validate();
    if (!(calendar_time >= 0.0)) throw InputError("calendar time must be nonnegative");
    if (std::isinf(calendar_time)) return death_ceiling(scenario);

    const double a = scenario.accrual_months;
    const double mu = scenario.dropout_hazard();
    const double s = std::min(calendar_time, a);
    double total = 0.0;
    for (const auto& arm : arm_models(scenario)) {
        const double h = arm.death_hazard + mu;
        // Integral over entry u in [0, s] of 1 - exp(-h (t - u)).
        const double tail = -std::exp(-h * (calendar_time - s)) * std::expm1(-h * s) / h;
        total += arm.patients * (arm.death_hazard / h) * (s - tail) / a;
    }
    return total;
}

double death_ceiling(const TrialScenario& scenario) {
    scenario.validate();
    const double mu = scenario.dropout_hazard();
    double total = 0.0;
    for (const auto& arm : arm_models(scenario)) {
        total += arm.patients * arm.death_hazard / (arm.death_hazard + mu);
    }
    return total;
}

double calendar_time_for_deaths(const TrialScenario& scenario, int target_deaths) {
    if (target_deaths < 1) throw InputError("death target must be at least 1");
    return calendar_time_for_deaths(scenario, static_cast<double>(target_deaths));
}

double calendar_time_for_deaths(const TrialScenario& scenario, double target) {
    if (!(target >= 0.0) || !std::isfinite(target)) {
        throw InputError("death target must be nonnegative and finite");
    }
    if (target == 0.0) return 0.0;
    const double ceiling = death_ceiling(scenario);
    if (!(target < ceiling)) {
        throw DomainError("target of " + format_double(target) +
                          " deaths is unreachable: expected deaths never exceed " +
                          format_double(ceiling));
    }
    double lo = 0.0;
    double hi = scenario.accrual_months;
    while (expected_deaths(scenario, hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9) throw DomainError("death target not reached within 1e9 months");
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (expected_deaths(scenario, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double calibrate_control_median(TrialScenario scenario, double calendar_time, double target_deaths) {
    scenario.validate();
    if (!(calendar_time > 0.0) || !std::isfinite(calendar_time)) {
        throw InputError("calibration time must be positive");
    }
    if (!(target_deaths > 0.0)) throw InputError("calibration target must be positive");

    // Expected deaths fall as the median grows; bisect on log(median).
    auto deaths_at = [&](double log_median) {
        scenario.control_median_os_months = std::exp(log_median);
        return expected_deaths(scenario, calendar_time);
    };
    double lo = std::log(1e-3);
    double hi = std::log(1e6);
    if (!(deaths_at(lo) > target_deaths && deaths_at(hi) < target_deaths)) {
        throw DomainError("no control median reaches " + format_double(target_deaths) +
                          " expected deaths at month " + format_double(calendar_time));
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (deaths_at(mid) > target_deaths ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

std::vector<PatientRecord> generate_patients(const TrialScenario& scenario, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(scenario.n_patients);
    std::vector<Arm> arms(n, Arm::control);
    std::fill_n(arms.begin(), scenario.test_arm_size(), Arm::test);
    std::shuffle(arms.begin(), arms.end(), rng);

    std::uniform_real_distribution<double> entry(0.0, scenario.accrual_months);
    std::exponential_distribution<double> control_death(scenario.control_hazard());
    std::exponential_distribution<double> test_death(scenario.test_hazard());
    const double mu = scenario.dropout_hazard();
    std::exponential_distribution<double> dropout(mu > 0.0 ? mu : 1.0);

    std::vector<PatientRecord> patients;
    patients.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PatientRecord p{};
        p.entry_time = entry(rng);
        p.arm = arms[i];
        p.event_time = p.arm == Arm::test ? test_death(rng) : control_death(rng);
        p.dropout_time = mu > 0.0 ? dropout(rng) : kInf;
        patients.push_back(p);
    }
    return patients;
}

std::optional<AnalysisSnapshot> snapshot_at_deaths(std::span<const PatientRecord> patients,
                                                   int target_deaths) {
    return cut_at_deaths(patients, sorted_deaths(patients), target_deaths);
}

AnalysisSnapshot snapshot_at_time(std::span<const PatientRecord> patients, double cutoff_months) {
    return cut(patients, sorted_deaths(patients), cutoff_months);
}

SimulatedTrial simulate_trial(const TrialScenario& scenario, const AnalysisPlan& plan) {
    scenario.validate();
    std::mt19937_64 rng(scenario.rng_seed);
    const auto patients = generate_patients(scenario, rng);
    const auto deaths = sorted_deaths(patients);

    SimulatedTrial trial;
    trial.total_deaths = static_cast<int>(deaths.size());
    for (const auto& m : plan.milestones()) {
        auto snap = cut_at_deaths(patients, deaths, m.deaths);
        if (!snap) break;
        trial.snapshots.push_back(std::move(*snap));
    }
    return trial;
}

EstimateResult estimate_log_hr(const AnalysisSnapshot& snapshot) {
    return estimate_log_hr(std::span<const SurvivalRecord>(snapshot.records));
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept {
    return splitmix64(splitmix64(master) ^ rep);
}

bool EmpiricalMilestone::agrees(double n_se) const noexcept {
    return std::abs(empirical_prob - analytic_prob) <= n_se * mc_se;
}

bool EmpiricalOC::all_agree(double n_se) const noexcept {
    return std::all_of(milestones.begin(), milestones.end(),
                       [n_se](const EmpiricalMilestone& m) { return m.agrees(n_se); });
}

namespace {

struct RawRow {
    double cutoff = 0.0;
    int deaths = 0;
    bool reached = false;
    EstimateResult fit;
    bool met = false;
};

struct Tally {
    std::vector<int> met;
    std::vector<int> divergent;
    std::vector<int> unreachable;

    explicit Tally(std::size_t m) : met(m, 0), divergent(m, 0), unreachable(m, 0) {}
};

void check_reachability(const TrialScenario& scenario, const AnalysisPlan& plan) {
    const double mu = scenario.dropout_hazard();
    const double n_test = scenario.test_arm_size();
    const double n_control = scenario.n_patients - n_test;
    const double p_control = scenario.control_hazard() / (scenario.control_hazard() + mu);
    const double p_test = scenario.test_hazard() / (scenario.test_hazard() + mu);
    const double mean = n_control * p_control + n_test * p_test;
    const double sd = std::sqrt(n_control * p_control * (1.0 - p_control) +
                                n_test * p_test * (1.0 - p_test));
    const double reachable = mean - kReachabilityZ * sd;
    for (const auto& m : plan.milestones()) {
        if (static_cast<double>(m.deaths) > reachable) {
            throw DomainError("milestone of " + std::to_string(m.deaths) +
                              " deaths is reached in fewer than 99% of replications (expected "
                              "eventual deaths " + format_double(mean) + ", sd " +
                              format_double(sd) + ")");
        }
    }
}

}  // namespace

EmpiricalOC empirical_oc(const TrialScenario& scenario, const GuidelineParams& params,
                         const AnalysisPlan& plan, int reps, const EmpiricalOcOptions& options) {
    scenario.validate();
    params.validate();
    if (reps < 100) throw InputError("empirical_oc needs at least 100 replications", "sim.reps");
    check_reachability(scenario, plan);

    const auto guideline = build_guideline(params, plan, {});
    const std::size_t m = plan.size();
    std::vector<double> log_thresholds;
    for (const auto& row : guideline.rows) log_thresholds.push_back(row.threshold_hr.log());

    std::vector<RawRow> raw;
    if (options.raw_csv) raw.resize(static_cast<std::size_t>(reps) * m);

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1u, static_cast<unsigned>(reps));
    std::vector<Tally> tallies(threads, Tally(m));
    std::atomic<bool> out_of_time{false};

    auto worker = [&](unsigned id) {
        Tally& tally = tallies[id];
        TrialScenario local = scenario;
        int since_check = 0;
        for (int rep = static_cast<int>(id); rep < reps; rep += static_cast<int>(threads)) {
            if (options.deadline && ++since_check >= 16) {
                since_check = 0;
                if (out_of_time.load(std::memory_order_relaxed)) return;
                if (std::chrono::steady_clock::now() > *options.deadline) {
                    out_of_time.store(true);
                    return;
                }
            }
            local.rng_seed = replication_seed(scenario.rng_seed, static_cast<std::uint64_t>(rep));
            std::mt19937_64 rng(local.rng_seed);
            const auto patients = generate_patients(local, rng);
            const auto deaths = sorted_deaths(patients);
            for (std::size_t i = 0; i < m; ++i) {
                RawRow row;
                auto snap = cut_at_deaths(patients, deaths, plan.milestones()[i].deaths);
                if (!snap) {
                    ++tally.unreachable[i];
                    row.deaths = static_cast<int>(deaths.size());
                } else {
                    row.reached = true;
                    row.cutoff = snap->cutoff_months;
                    row.deaths = snap->deaths;
                    row.fit = estimate_log_hr(*snap);
                    if (!row.fit.converged) {
                        ++tally.divergent[i];
                    } else if (row.fit.log_hr < log_thresholds[i]) {
                        row.met = true;
                        ++tally.met[i];
                    }
                }
                if (options.raw_csv) raw[static_cast<std::size_t>(rep) * m + i] = std::move(row);
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    }
    if (out_of_time.load()) throw BudgetExceeded("simulation exceeded its wall-clock budget");

    EmpiricalOC result{reps, scenario.rng_seed, scenario.true_os_hr, {}};
    for (std::size_t i = 0; i < m; ++i) {
        EmpiricalMilestone em;
        em.label = plan.milestones()[i].label;
        em.deaths = plan.milestones()[i].deaths;
        em.threshold = guideline.rows[i].threshold_hr;
        for (const auto& t : tallies) {
            em.met += t.met[i];
            em.divergent += t.divergent[i];
            em.unreachable += t.unreachable[i];
        }
        em.empirical_prob = static_cast<double>(em.met) / reps;
        em.mc_se = std::sqrt(em.empirical_prob * (1.0 - em.empirical_prob) / reps);
        em.analytic_prob = positivity_probability(em.threshold, em.deaths, params.k,
                                                  scenario.true_os_hr);
        result.milestones.push_back(std::move(em));
    }

    if (options.raw_csv) {
        auto& out = *options.raw_csv;
        out << "rep,milestone,cutoff_months,deaths,log_hr,std_err,converged,met_threshold\n";
        for (int rep = 0; rep < reps; ++rep) {
            for (std::size_t i = 0; i < m; ++i) {
                const auto& row = raw[static_cast<std::size_t>(rep) * m + i];
                const auto& ms = plan.milestones()[i];
                out << rep << ',' << (ms.label.empty() ? std::to_string(ms.deaths) : ms.label)
                    << ',' << (row.reached ? format_double(row.cutoff) : std::string{}) << ','
                    << row.deaths << ','
                    << (row.reached ? format_double(row.fit.log_hr) : std::string{}) << ','
                    << (row.fit.converged ? format_double(row.fit.std_err) : std::string{}) << ','
                    << (row.fit.converged ? "true" : "false") << ','
                    << (row.met ? "true" : "false") << '\n';
            }
        }
    }
    return result;
}

}  // namespace osmon
