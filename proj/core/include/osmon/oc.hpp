#pragma once

#include <span>
#include <string>
#include <vector>

#include "osmon/guideline.hpp"

namespace osmon {

struct ProbeError {
    HazardRatio true_hr;
    double error_prob;
};

// Operating characteristics at one primary (non-final) milestone.
struct PrimaryOc {
    std::string label;
    int deaths = 0;
    HazardRatio threshold;
    double fp;                    // threshold met under delta_null
    std::vector<ProbeError> fn;   // threshold missed under each probe
};

// False-positive/false-negative quadruple of a monitoring guideline.
// fp_final and fn_final cover the final analysis; `primary` holds one entry
// per non-final milestone. beta_fa is fn_final at delta_alt.
struct OperatingCharacteristics {
    std::vector<HazardRatio> probe_hrs;
    int final_deaths = 0;
    HazardRatio final_threshold;
    double fp_final;
    std::vector<ProbeError> fn_final;
    double beta_fa;
    std::vector<PrimaryOc> primary;

    // Entry for a given primary milestone; throws InputError if absent.
    const PrimaryOc& at_primary(int deaths) const;
};

OperatingCharacteristics analytic_oc(const GuidelineParams& params, const AnalysisPlan& plan,
                                     std::span<const HazardRatio> probe_hrs);

// Same quantities computed from an already-built guideline.
OperatingCharacteristics analytic_oc(const MonitoringGuideline& guideline);

struct CurvePoint {
    HazardRatio true_hr;
    double positivity_prob;
};

struct PowerCurve {
    int deaths = 0;
    HazardRatio threshold;
    std::vector<CurvePoint> points;
};

// Positivity probability at each grid HR. The grid must be nonempty and
// strictly increasing.
PowerCurve power_curve(HazardRatio threshold, int deaths, AllocationRatio k,
                       std::span<const HazardRatio> hr_grid);

// `count` HRs spaced uniformly in log-HR between lo and hi inclusive.
std::vector<HazardRatio> log_uniform_grid(HazardRatio lo = HazardRatio(0.5),
                                          HazardRatio hi = HazardRatio(2.0), int count = 151);

// One curve per guideline row.
std::vector<PowerCurve> guideline_curves(const MonitoringGuideline& guideline,
                                         std::span<const HazardRatio> hr_grid);

// {delta_alt, 0.95, 1.0, delta_null}, without duplicates.
std::vector<HazardRatio> default_probes(const GuidelineParams& params);

}  // namespace osmon
