#include "osmon/sample_size.hpp"

#include <cmath>
#include <limits>

#include "osmon/normal.hpp"

namespace osmon {

InformationLevel fisher_information(AllocationRatio k, int deaths) {
    if (deaths < 1) throw InputError("death count must be at least 1");
    const double kv = k.value();
    return InformationLevel(kv * static_cast<double>(deaths) / ((kv + 1.0) * (kv + 1.0)));
}

double log_hr_std_error(AllocationRatio k, int deaths) {
    if (deaths < 1) throw InputError("death count must be at least 1");
    return (k.value() + 1.0) / std::sqrt(k.value() * static_cast<double>(deaths));
}

int required_deaths(HazardRatio delta_null, HazardRatio delta_alt, Probability alpha,
                    Probability power, AllocationRatio k) {
    const double log_ratio = delta_null.log() - delta_alt.log();
    if (!(log_ratio > 0.0)) {
        throw InputError("required_deaths: delta_alt must be below delta_null");
    }
    if (!(alpha.value() < 0.5)) throw InputError("required_deaths: alpha must be below 0.5");
    if (!(power.value() > 0.5)) throw InputError("required_deaths: power must exceed 0.5");

    const double kv = k.value();
    const double z_sum = std_normal_quantile(alpha.complement()) + std_normal_quantile(power);
    const double exact = (kv + 1.0) * (kv + 1.0) / kv * std::pow(z_sum / log_ratio, 2);
    // Guard against values a few ulps above an exact integer.
    const double rounded = std::ceil(exact * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()));
    if (rounded > static_cast<double>(std::numeric_limits<int>::max())) {
        throw DomainError("required_deaths: result exceeds representable range");
    }
    return static_cast<int>(rounded);
}

}  // namespace osmon
