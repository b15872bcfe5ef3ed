#pragma once

// Brute-force expected-death oracle: simulate patients one by one with
// Bernoulli(k/(k+1)) arm assignment and count deaths by a calendar time.

#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

struct ExpScenario {
    std::int64_t n;
    double accrual;
    double k;
    double control_median;
    double hr;
    double annual_dropout;
};

inline double simulated_deaths(const ExpScenario& s, double calendar_time, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lambda_c = std::log(2.0) / s.control_median;
    const double mu = -std::log(1.0 - s.annual_dropout) / 12.0;
    std::int64_t deaths = 0;
    for (std::int64_t i = 0; i < s.n; ++i) {
        const double entry = s.accrual * unit(rng);
        const bool test = unit(rng) < s.k / (s.k + 1.0);
        const double lambda = test ? lambda_c * s.hr : lambda_c;
        const double death = -std::log1p(-unit(rng)) / lambda;
        const double drop = mu > 0.0 ? -std::log1p(-unit(rng)) / mu : INFINITY;
        if (death < drop && entry + death <= calendar_time) ++deaths;
    }
    return static_cast<double>(deaths);
}

}  // namespace oracle
