#pragma once

#include "osmon/types.hpp"

namespace osmon {

// Fisher information k*L/(k+1)^2 for the log-HR estimator after `deaths`
// deaths under k:1 allocation.
InformationLevel fisher_information(AllocationRatio k, int deaths);

// Standard deviation of the log-HR estimator, (k+1)/sqrt(k*L).
double log_hr_std_error(AllocationRatio k, int deaths);

// Smallest death count for a one-sided level-`alpha` test of HR >= delta_null
// with power `power` when the true HR is delta_alt.
//
// Requires delta_alt < delta_null, 0 < alpha < 0.5 and 0.5 < power < 1.
int required_deaths(HazardRatio delta_null, HazardRatio delta_alt, Probability alpha,
                    Probability power, AllocationRatio k = AllocationRatio{});

}  // namespace osmon
