#pragma once

// Guideline configurations from the worked examples (Tables 3-6).

#include <vector>

#include "osmon/guideline.hpp"

namespace fixtures {

struct Config {
    osmon::GuidelineParams params;
    std::vector<int> deaths;
    std::vector<double> probes;

    osmon::AnalysisPlan plan() const { return osmon::AnalysisPlan::from_deaths(deaths); }

    std::vector<osmon::HazardRatio> probe_hrs() const {
        std::vector<osmon::HazardRatio> out;
        for (double p : probes) out.emplace_back(p);
        return out;
    }
};

inline osmon::GuidelineParams params(double dn, double da, double gamma_fa, double beta_pa,
                                     double k = 1.0) {
    return {osmon::HazardRatio(dn), osmon::HazardRatio(da), osmon::Probability(gamma_fa),
            osmon::Probability(beta_pa), osmon::AllocationRatio(k)};
}

inline Config table3() { return {params(1.3, 0.80, 0.025, 0.10), {60, 89, 110, 131, 178}, {0.80}}; }
inline Config table4() { return {params(1.3, 0.70, 0.10, 0.10), {28, 42, 70}, {0.70, 0.95}}; }
inline Config table5() { return {params(1.3, 0.95, 0.20, 0.25), {28, 42, 70}, {0.95, 1.0}}; }
inline Config table6() { return {params(1.333, 0.70, 0.20, 0.10), {22, 34}, {0.70, 0.95}}; }

}  // namespace fixtures
