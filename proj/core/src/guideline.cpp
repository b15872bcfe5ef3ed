#include "osmon/guideline.hpp"

#include <algorithm>
#include <cmath>

#include "osmon/normal.hpp"
#include "osmon/sample_size.hpp"

namespace osmon {

namespace {

void require_deaths(int deaths, const char* what) {
    if (deaths < 1) throw InputError(std::string(what) + ": death count must be at least 1");
}

// The primary-analysis formulas stay defined at delta_alt == delta_null
// (gamma_pa collapses to 1 - beta_pa), so only the weak ordering is required.
void validate_for_primary(const GuidelineParams& params) {
    if (!(params.delta_null.value() > 1.0)) {
        throw InputError("delta_null must exceed 1", "delta_null");
    }
    if (params.delta_alt > params.delta_null) {
        throw InputError("delta_alt must not exceed delta_null", "delta_alt");
    }
    if (!(params.beta_pa.value() < 0.5)) {
        throw InputError("beta_pa must lie in (0, 0.5)", "beta_pa");
    }
}

}  // namespace

void GuidelineParams::validate() const {
    if (!(delta_null.value() > 1.0)) {
        throw InputError("delta_null must exceed 1", "delta_null");
    }
    if (!(delta_alt < delta_null)) {
        throw InputError("delta_alt must be below delta_null", "delta_alt");
    }
    if (!(gamma_fa.value() < 0.5)) {
        throw InputError("gamma_fa must lie in (0, 0.5)", "gamma_fa");
    }
    if (!(beta_pa.value() < 0.5)) {
        throw InputError("beta_pa must lie in (0, 0.5)", "beta_pa");
    }
}

AnalysisPlan::AnalysisPlan(std::vector<Milestone> milestones) : milestones_(std::move(milestones)) {
    if (milestones_.empty()) throw InputError("analysis plan needs at least one milestone", "milestones");
    int previous = 0;
    for (std::size_t i = 0; i < milestones_.size(); ++i) {
        const auto& m = milestones_[i];
        const std::string path = "milestones[" + std::to_string(i) + "]";
        if (m.deaths < 1) throw InputError("death count must be at least 1", path + ".deaths");
        if (m.deaths <= previous) {
            throw InputError("death counts must be strictly increasing", path + ".deaths");
        }
        previous = m.deaths;
        const bool last = i + 1 == milestones_.size();
        if (m.is_final != last) {
            throw InputError(last ? "last milestone must be flagged final"
                                  : "only the last milestone may be flagged final",
                             path + ".final");
        }
    }
}

AnalysisPlan AnalysisPlan::from_deaths(std::span<const int> deaths) {
    std::vector<Milestone> out;
    out.reserve(deaths.size());
    for (std::size_t i = 0; i < deaths.size(); ++i) {
        out.push_back({std::string{}, deaths[i], i + 1 == deaths.size()});
    }
    return AnalysisPlan(std::move(out));
}

HazardRatio threshold_for_rate(HazardRatio delta_null, Probability gamma, int deaths,
                               AllocationRatio k) {
    require_deaths(deaths, "threshold_for_rate");
    return HazardRatio::from_log(delta_null.log() +
                                 std_normal_quantile(gamma) * log_hr_std_error(k, deaths));
}

HazardRatio final_threshold(const GuidelineParams& params, int l_fa) {
    params.validate();
    return threshold_for_rate(params.delta_null, params.gamma_fa, l_fa, params.k);
}

Probability primary_fp_rate(const GuidelineParams& params, int l_pa) {
    validate_for_primary(params);
    require_deaths(l_pa, "primary_fp_rate");
    const double drift = (params.delta_null.log() - params.delta_alt.log()) /
                         log_hr_std_error(params.k, l_pa);
    // 1 - Phi(x) evaluated as Phi(-x) to keep precision in the upper tail.
    const double gamma = std_normal_cdf(std_normal_quantile(params.beta_pa.complement()) - drift);
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DomainError("primary false-positive rate underflows at " + std::to_string(l_pa) +
                          " deaths");
    }
    return Probability(gamma);
}

HazardRatio primary_threshold(const GuidelineParams& params, int l_pa) {
    return threshold_for_rate(params.delta_null, primary_fp_rate(params, l_pa), l_pa, params.k);
}

std::optional<double> ci_level_to_rule_out(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw InputError("ci_level_to_rule_out: rate must lie in (0, 1)");
    }
    if (gamma >= 0.5) return std::nullopt;
    return (1.0 - 2.0 * gamma) * 100.0;
}

double positivity_probability(HazardRatio threshold, int deaths, AllocationRatio k,
                              HazardRatio true_hr) {
    require_deaths(deaths, "positivity_probability");
    return std_normal_cdf((threshold.log() - true_hr.log()) / log_hr_std_error(k, deaths));
}

std::vector<HazardRatio> resolve_probes(const GuidelineParams& params,
                                        std::span<const HazardRatio> probe_hrs) {
    std::vector<HazardRatio> out{params.delta_alt};
    for (const auto& hr : probe_hrs) {
        if (std::find(out.begin(), out.end(), hr) == out.end()) out.push_back(hr);
    }
    return out;
}

MonitoringGuideline build_guideline(const GuidelineParams& params, const AnalysisPlan& plan,
                                    std::span<const HazardRatio> probe_hrs) {
    params.validate();
    MonitoringGuideline guideline{params, resolve_probes(params, probe_hrs), {}};
    guideline.rows.reserve(plan.size());

    for (const auto& m : plan.milestones()) {
        const Probability gamma = m.is_final ? params.gamma_fa : primary_fp_rate(params, m.deaths);
        const HazardRatio threshold = threshold_for_rate(params.delta_null, gamma, m.deaths, params.k);

        GuidelineRow row{m.label, m.deaths, m.is_final, threshold, gamma,
                         ci_level_to_rule_out(gamma.value()), {}, threshold >= params.delta_null};
        row.positivity_prob_under.reserve(guideline.probe_hrs.size());
        for (const auto& hr : guideline.probe_hrs) {
            row.positivity_prob_under.push_back(
                {hr, positivity_probability(threshold, m.deaths, params.k, hr)});
        }
        guideline.rows.push_back(std::move(row));
    }
    return guideline;
}

MarginAndThreshold t2dm_margin_and_threshold(int l_pa, Probability alpha, Probability power,
                                             AllocationRatio k) {
    require_deaths(l_pa, "t2dm_margin_and_threshold");
    const double se = log_hr_std_error(k, l_pa);
    const double z_power = std_normal_quantile(power);
    const double z_alpha = std_normal_quantile(alpha.complement());
    return {HazardRatio::from_log((z_alpha + z_power) * se), HazardRatio::from_log(z_power * se)};
}

HazardRatio superiority_threshold(int events, Probability alpha, AllocationRatio k) {
    require_deaths(events, "superiority_threshold");
    return HazardRatio::from_log(-std_normal_quantile(alpha.complement()) *
                                 log_hr_std_error(k, events));
}

}  // namespace osmon
