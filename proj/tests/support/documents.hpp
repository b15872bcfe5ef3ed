#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fixtures {

inline nlohmann::json table3_doc() {
    return nlohmann::json::parse(R"({
      "version": "1",
      "delta_null": 1.3, "delta_alt": 0.8, "gamma_fa": 0.025, "beta_pa": 0.10, "k": 1,
      "milestones": [{"deaths": 60}, {"deaths": 89}, {"deaths": 110}, {"deaths": 131},
                     {"deaths": 178, "final": true}],
      "probe_hrs": [0.8]
    })");
}

inline nlohmann::json table4_doc() {
    return nlohmann::json::parse(R"({
      "version": "1",
      "delta_null": 1.3, "delta_alt": 0.7, "gamma_fa": 0.10, "beta_pa": 0.10, "k": 1,
      "milestones": [{"deaths": 28}, {"deaths": 42}, {"deaths": 70, "final": true}],
      "probe_hrs": [0.7, 0.95],
      "scenario": {"n_patients": 300, "accrual_months": 24, "control_median_os_months": 60,
                   "true_os_hr": 0.7, "annual_dropout_prob": 0.01},
      "sim": {"reps": 200, "seed": 11}
    })");
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json table6_doc() {
    return nlohmann::json::parse(read_text(std::string(OSMON_TEST_DATA_DIR) + "/table6.json"));
}

}  // namespace fixtures
