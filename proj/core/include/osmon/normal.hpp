#pragma once

#include "osmon/types.hpp"

namespace osmon {

// Standard normal CDF. Absolute error below 1e-15 across the real line;
// throws InputError for non-finite z.
double std_normal_cdf(double z);

// Standard normal density.
double std_normal_pdf(double z) noexcept;

// Inverse of std_normal_cdf.
double std_normal_quantile(Probability p);
double std_normal_quantile(double p);

}  // namespace osmon
