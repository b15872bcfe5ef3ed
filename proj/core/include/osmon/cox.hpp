#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace osmon {

enum class Arm : std::uint8_t { control = 0, test = 1 };

// One patient's right-censored survival observation at an analysis cutoff.
struct SurvivalRecord {
    double time = 0.0;  // observed follow-up, months from entry
    bool event = false;
    Arm arm = Arm::control;
};

struct EstimateResult {
    double log_hr = 0.0;   // test vs control
    double std_err = 0.0;  // inverse observed information at the maximizer
    bool converged = false;
    int iterations = 0;
    std::string reason;    // set when converged is false
};

// Cox partial-likelihood fit with a single binary treatment covariate and
// Breslow tie handling. Damped Newton from 0 to |score| < 1e-8; fits with no
// deaths in one arm or |log HR| > log 50 are reported as not converged.
EstimateResult estimate_log_hr(std::span<const SurvivalRecord> records);

}  // namespace osmon
