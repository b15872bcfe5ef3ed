#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osmon/types.hpp"

namespace osmon {

// Clinical design inputs for an OS monitoring guideline.
struct GuidelineParams {
    HazardRatio delta_null;  // smallest unacceptable detrimental HR, > 1
    HazardRatio delta_alt;   // plausible HR under expected benefit, < delta_null
    Probability gamma_fa;    // one-sided false-positive rate at the final analysis, < 0.5
    Probability beta_pa;     // false-negative rate at the primary analysis, < 0.5
    AllocationRatio k{};     // k:1 test:control

    // Throws InputError naming the offending field.
    void validate() const;
};

struct Milestone {
    std::string label;
    int deaths = 0;
    bool is_final = false;
};

// Ordered death-count milestones; the last (and only the last) is final.
class AnalysisPlan {
public:
    explicit AnalysisPlan(std::vector<Milestone> milestones);

    // Plan with unlabeled milestones; the last count is the final analysis.
    static AnalysisPlan from_deaths(std::span<const int> deaths);

    std::span<const Milestone> milestones() const noexcept { return milestones_; }
    std::size_t size() const noexcept { return milestones_.size(); }
    const Milestone& final_milestone() const noexcept { return milestones_.back(); }

private:
    std::vector<Milestone> milestones_;
};

struct ProbeProbability {
    HazardRatio true_hr;
    double positivity_prob;  // P(estimated HR < threshold | true_hr)
};

struct GuidelineRow {
    std::string label;
    int deaths = 0;
    bool is_final = false;
    HazardRatio threshold_hr;
    Probability one_sided_fp_rate;
    std::optional<double> ci_level_pct;  // empty when the fp rate is >= 0.5
    std::vector<ProbeProbability> positivity_prob_under;
    bool warning_threshold_exceeds_margin = false;
};

struct MonitoringGuideline {
    GuidelineParams params;
    std::vector<HazardRatio> probe_hrs;  // delta_alt first
    std::vector<GuidelineRow> rows;
};

// Positivity threshold on the HR scale for one-sided false-positive rate
// `gamma` against delta_null after `deaths` deaths:
//   delta_null * exp{(k+1) * PhiInv(gamma) / sqrt(k * deaths)}.
HazardRatio threshold_for_rate(HazardRatio delta_null, Probability gamma, int deaths,
                               AllocationRatio k);

HazardRatio final_threshold(const GuidelineParams& params, int l_fa);

// Implied one-sided false-positive rate at a primary analysis whose threshold
// is met with probability 1 - beta_pa under delta_alt.
Probability primary_fp_rate(const GuidelineParams& params, int l_pa);

HazardRatio primary_threshold(const GuidelineParams& params, int l_pa);

// (1 - 2 gamma) * 100; empty when gamma >= 0.5. Throws for gamma outside (0, 1).
std::optional<double> ci_level_to_rule_out(double gamma);

// P(estimated HR < threshold) when the log-HR estimator is
// N(log true_hr, (k+1)^2 / (k * deaths)).
double positivity_probability(HazardRatio threshold, int deaths, AllocationRatio k,
                              HazardRatio true_hr);

// Probe list used by build_guideline: delta_alt first, then the caller's
// probes in order with duplicates removed.
std::vector<HazardRatio> resolve_probes(const GuidelineParams& params,
                                        std::span<const HazardRatio> probe_hrs);

MonitoringGuideline build_guideline(const GuidelineParams& params, const AnalysisPlan& plan,
                                    std::span<const HazardRatio> probe_hrs);

struct MarginAndThreshold {
    HazardRatio margin;
    HazardRatio threshold;
};

// Fixed-level margin framing: the HR margin ruled out at one-sided `alpha`
// with power `power` under HR = 1 after l_pa events, and the estimated-HR
// threshold that rules it out.
MarginAndThreshold t2dm_margin_and_threshold(int l_pa, Probability alpha, Probability power,
                                             AllocationRatio k = AllocationRatio{});

// Largest estimated HR reaching one-sided significance `alpha` for
// superiority after `events` events: exp{-(k+1) PhiInv(1 - alpha) / sqrt(k * events)}.
HazardRatio superiority_threshold(int events, Probability alpha,
                                  AllocationRatio k = AllocationRatio{});

}  // namespace osmon
