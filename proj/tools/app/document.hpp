#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osmon/guideline.hpp"
#include "osmon/oc.hpp"
#include "osmon/trial_sim.hpp"

namespace osmon::app {

inline constexpr const char* kToolName = "osmon";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

struct SimSettings {
    int reps = 0;
    std::uint64_t seed = 0;
};

// Declarative design document driving every command. `scenario` carries
// k from the top level and its seed from `sim` (0 when absent).
struct DesignDocument {
    std::string version;
    GuidelineParams params;
    AnalysisPlan plan;
    std::vector<HazardRatio> probe_hrs;  // resolved: delta_alt first
    std::optional<TrialScenario> scenario;
    std::optional<SimSettings> sim;
};

// Parses a design document, or the "document" member of a json artifact
// produced by this tool. Throws InputError carrying a field path.
DesignDocument parse_document(const nlohmann::json& j);
DesignDocument parse_document_text(const std::string& text);
DesignDocument load_document_file(const std::string& path);

// Canonical resolved form; parse_document(to_json(d)) reproduces d.
nlohmann::json to_json(const DesignDocument& doc);

// "fnv1a64:<16 hex digits>" over the canonical resolved document.
std::string input_digest(const DesignDocument& doc);

}  // namespace osmon::app
