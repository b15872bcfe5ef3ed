#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "document.hpp"
#include "osmon/oc.hpp"

namespace osmon::app {

enum class Format { markdown, csv, json };

// Accepts "md", "markdown", "csv" and "json".
Format parse_format(const std::string& name);

struct Provenance {
    std::string tool_version;
    std::string input_digest;
};

struct TableArtifact {
    Format format = Format::markdown;
    std::string content;
    Provenance provenance;
};

struct CommandResult {
    TableArtifact artifact;
    int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDomainError = 3;

struct MilestoneTiming {
    std::string label;
    int deaths = 0;
    std::optional<double> months;  // empty when unreachable
};

struct DeathsTimeline {
    std::vector<std::pair<double, double>> points;  // (months, expected deaths)
    std::vector<MilestoneTiming> milestones;

    bool any_unreachable() const noexcept;
};

struct DeathsOptions {
    double horizon_months = 120.0;
    double step_months = 6.0;
};

struct SimulateOptions {
    unsigned threads = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::ostream* raw_csv = nullptr;
};

// Applies --seed / --reps style overrides; creates the sim block when needed.
void apply_overrides(DesignDocument& doc, std::optional<std::uint64_t> seed,
                     std::optional<int> reps);

DeathsTimeline deaths_timeline(const DesignDocument& doc, const DeathsOptions& options);
EmpiricalOC run_simulation(const DesignDocument& doc, const SimulateOptions& options);

// Result payloads shared by the json artifacts and the HTTP service.
nlohmann::json guideline_json(const MonitoringGuideline& guideline);
nlohmann::json oc_json(const OperatingCharacteristics& oc, const std::vector<PowerCurve>& curves);
nlohmann::json deaths_json(const DeathsTimeline& timeline);
nlohmann::json empirical_json(const EmpiricalOC& result);

nlohmann::json design_result(const DesignDocument& doc);
nlohmann::json oc_result(const DesignDocument& doc);

CommandResult cmd_design(const DesignDocument& doc, Format format);
CommandResult cmd_oc(const DesignDocument& doc, Format format);
CommandResult cmd_deaths(const DesignDocument& doc, Format format, const DeathsOptions& options = {});
CommandResult cmd_simulate(const DesignDocument& doc, Format format,
                           const SimulateOptions& options = {});

// Round-half-up to `decimals` places.
std::string fixed(double value, int decimals);

}  // namespace osmon::app
