#include "osmon/oc.hpp"

#include <algorithm>
#include <cmath>

namespace osmon {

namespace {

std::vector<ProbeError> misses(const GuidelineRow& row) {
    std::vector<ProbeError> out;
    out.reserve(row.positivity_prob_under.size());
    for (const auto& p : row.positivity_prob_under) {
        out.push_back({p.true_hr, 1.0 - p.positivity_prob});
    }
    return out;
}

}  // namespace

const PrimaryOc& OperatingCharacteristics::at_primary(int deaths) const {
    const auto it = std::find_if(primary.begin(), primary.end(),
                                 [deaths](const PrimaryOc& p) { return p.deaths == deaths; });
    if (it == primary.end()) {
        throw InputError("no primary milestone at " + std::to_string(deaths) + " deaths");
    }
    return *it;
}

OperatingCharacteristics analytic_oc(const MonitoringGuideline& guideline) {
    const auto& params = guideline.params;
    const auto& final_row = guideline.rows.back();

    OperatingCharacteristics oc{
        guideline.probe_hrs,
        final_row.deaths,
        final_row.threshold_hr,
        positivity_probability(final_row.threshold_hr, final_row.deaths, params.k,
                               params.delta_null),
        misses(final_row),
        1.0 - positivity_probability(final_row.threshold_hr, final_row.deaths, params.k,
                                     params.delta_alt),
        {}};

    for (std::size_t i = 0; i + 1 < guideline.rows.size(); ++i) {
        const auto& row = guideline.rows[i];
        oc.primary.push_back(
            {row.label, row.deaths, row.threshold_hr,
             positivity_probability(row.threshold_hr, row.deaths, params.k, params.delta_null),
             misses(row)});
    }
    return oc;
}

OperatingCharacteristics analytic_oc(const GuidelineParams& params, const AnalysisPlan& plan,
                                     std::span<const HazardRatio> probe_hrs) {
    return analytic_oc(build_guideline(params, plan, probe_hrs));
}

PowerCurve power_curve(HazardRatio threshold, int deaths, AllocationRatio k,
                       std::span<const HazardRatio> hr_grid) {
    if (hr_grid.empty()) throw InputError("power_curve: HR grid is empty");
    for (std::size_t i = 1; i < hr_grid.size(); ++i) {
        if (!(hr_grid[i - 1] < hr_grid[i])) {
            throw InputError("power_curve: HR grid must be strictly increasing");
        }
    }
    PowerCurve curve{deaths, threshold, {}};
    curve.points.reserve(hr_grid.size());
    for (const auto& hr : hr_grid) {
        curve.points.push_back({hr, positivity_probability(threshold, deaths, k, hr)});
    }
    return curve;
}

std::vector<HazardRatio> log_uniform_grid(HazardRatio lo, HazardRatio hi, int count) {
    if (count < 2) throw InputError("log_uniform_grid: need at least two points");
    if (!(lo < hi)) throw InputError("log_uniform_grid: lo must be below hi");
    std::vector<HazardRatio> grid;
    grid.reserve(static_cast<std::size_t>(count));
    const double step = (hi.log() - lo.log()) / (count - 1);
    for (int i = 0; i < count; ++i) {
        grid.push_back(i + 1 == count ? hi : HazardRatio::from_log(lo.log() + step * i));
    }
    return grid;
}

std::vector<PowerCurve> guideline_curves(const MonitoringGuideline& guideline,
                                         std::span<const HazardRatio> hr_grid) {
    std::vector<PowerCurve> curves;
    curves.reserve(guideline.rows.size());
    for (const auto& row : guideline.rows) {
        curves.push_back(power_curve(row.threshold_hr, row.deaths, guideline.params.k, hr_grid));
    }
    return curves;
}

std::vector<HazardRatio> default_probes(const GuidelineParams& params) {
    std::vector<HazardRatio> out;
    for (const auto hr : {params.delta_alt, HazardRatio(0.95), HazardRatio(1.0), params.delta_null}) {
        if (std::find(out.begin(), out.end(), hr) == out.end()) out.push_back(hr);
    }
    return out;
}

}  // namespace osmon
