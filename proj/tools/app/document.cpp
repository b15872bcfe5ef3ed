#include "document.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace osmon::app {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& base) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw InputError("missing required field", join(base, key));
    }
    return *it;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) throw InputError("expected a number", path);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError("expected a finite number", path);
    return x;
}

std::int64_t integer_at(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) {
            return static_cast<std::int64_t>(x);
        }
    }
    throw InputError("expected an integer", path);
}

int int_at(const json& v, const std::string& path) {
    const auto x = integer_at(v, path);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw InputError("integer out of range", path);
    }
    return static_cast<int>(x);
}

// Wraps a strong-type constructor so range failures carry the field path.
template <typename T>
T typed_at(const json& v, const std::string& path) {
    const double x = number_at(v, path);
    try {
        return T(x);
    } catch (const InputError& e) {
        throw InputError(e.what(), path);
    }
}

GuidelineParams parse_params(const json& j) {
    GuidelineParams params{
        typed_at<HazardRatio>(require(j, "delta_null", ""), "delta_null"),
        typed_at<HazardRatio>(require(j, "delta_alt", ""), "delta_alt"),
        typed_at<Probability>(require(j, "gamma_fa", ""), "gamma_fa"),
        typed_at<Probability>(require(j, "beta_pa", ""), "beta_pa"),
        AllocationRatio{}};
    if (const auto it = j.find("k"); it != j.end() && !it->is_null()) {
        params.k = typed_at<AllocationRatio>(*it, "k");
    }
    params.validate();
    return params;
}

AnalysisPlan parse_plan(const json& j) {
    const json& list = require(j, "milestones", "");
    if (!list.is_array()) throw InputError("expected an array", "milestones");
    std::vector<Milestone> milestones;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "milestones[" + std::to_string(i) + "]";
        const json& item = list[i];
        if (!item.is_object()) throw InputError("expected an object", path);
        Milestone m;
        if (const auto it = item.find("label"); it != item.end() && !it->is_null()) {
            if (!it->is_string()) throw InputError("expected a string", path + ".label");
            m.label = it->get<std::string>();
        }
        m.deaths = int_at(require(item, "deaths", path), path + ".deaths");
        if (const auto it = item.find("final"); it != item.end() && !it->is_null()) {
            if (!it->is_boolean()) throw InputError("expected a boolean", path + ".final");
            m.is_final = it->get<bool>();
        }
        milestones.push_back(std::move(m));
    }
    return AnalysisPlan(std::move(milestones));
}

TrialScenario parse_scenario(const json& s, AllocationRatio k, std::uint64_t seed) {
    if (!s.is_object()) throw InputError("expected an object", "scenario");
    TrialScenario scenario;
    scenario.n_patients = int_at(require(s, "n_patients", "scenario"), "scenario.n_patients");
    scenario.accrual_months =
        number_at(require(s, "accrual_months", "scenario"), "scenario.accrual_months");
    scenario.control_median_os_months = number_at(
        require(s, "control_median_os_months", "scenario"), "scenario.control_median_os_months");
    scenario.true_os_hr =
        typed_at<HazardRatio>(require(s, "true_os_hr", "scenario"), "scenario.true_os_hr");
    if (const auto it = s.find("annual_dropout_prob"); it != s.end() && !it->is_null()) {
        scenario.annual_dropout_prob = number_at(*it, "scenario.annual_dropout_prob");
    }
    scenario.k = k;
    scenario.rng_seed = seed;
    scenario.validate();
    return scenario;
}

SimSettings parse_sim(const json& s) {
    if (!s.is_object()) throw InputError("expected an object", "sim");
    SimSettings sim;
    sim.reps = int_at(require(s, "reps", "sim"), "sim.reps");
    if (sim.reps < 1) throw InputError("reps must be positive", "sim.reps");
    const json& seed = require(s, "seed", "sim");
    if (seed.is_number_unsigned()) {
        sim.seed = seed.get<std::uint64_t>();
    } else {
        const auto v = integer_at(seed, "sim.seed");
        if (v < 0) throw InputError("seed must be nonnegative", "sim.seed");
        sim.seed = static_cast<std::uint64_t>(v);
    }
    return sim;
}

}  // namespace

DesignDocument parse_document(const json& input) {
    if (!input.is_object()) throw InputError("design document must be a json object");
    const json& j = input.contains("document") ? input.at("document") : input;
    if (!j.is_object()) throw InputError("expected an object", "document");

    const json& version = require(j, "version", "");
    std::string version_text;
    if (version.is_string()) {
        version_text = version.get<std::string>();
    } else if (version.is_number_integer()) {
        version_text = std::to_string(version.get<std::int64_t>());
    } else {
        throw InputError("expected a string", "version");
    }
    if (version_text != kSchemaVersion) {
        throw InputError("unsupported document version '" + version_text + "'", "version");
    }

    GuidelineParams params = parse_params(j);
    AnalysisPlan plan = parse_plan(j);

    std::vector<HazardRatio> probes;
    if (const auto it = j.find("probe_hrs"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw InputError("expected an array", "probe_hrs");
        for (std::size_t i = 0; i < it->size(); ++i) {
            probes.push_back(typed_at<HazardRatio>((*it)[i], "probe_hrs[" + std::to_string(i) + "]"));
        }
    } else {
        probes = default_probes(params);
    }
    probes = resolve_probes(params, probes);

    std::optional<SimSettings> sim;
    if (const auto it = j.find("sim"); it != j.end() && !it->is_null()) sim = parse_sim(*it);

    std::optional<TrialScenario> scenario;
    if (const auto it = j.find("scenario"); it != j.end() && !it->is_null()) {
        scenario = parse_scenario(*it, params.k, sim ? sim->seed : 0);
    }

    return DesignDocument{version_text, params, std::move(plan), std::move(probes), scenario, sim};
}

DesignDocument parse_document_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed json: ") + e.what());
    }
    return parse_document(j);
}

DesignDocument load_document_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open design document '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document_text(buf.str());
}

json to_json(const DesignDocument& doc) {
    json j;
    j["version"] = doc.version;
    j["delta_null"] = doc.params.delta_null.value();
    j["delta_alt"] = doc.params.delta_alt.value();
    j["gamma_fa"] = doc.params.gamma_fa.value();
    j["beta_pa"] = doc.params.beta_pa.value();
    j["k"] = doc.params.k.value();
    json milestones = json::array();
    for (const auto& m : doc.plan.milestones()) {
        milestones.push_back({{"label", m.label}, {"deaths", m.deaths}, {"final", m.is_final}});
    }
    j["milestones"] = std::move(milestones);
    json probes = json::array();
    for (const auto& hr : doc.probe_hrs) probes.push_back(hr.value());
    j["probe_hrs"] = std::move(probes);
    if (doc.scenario) {
        const auto& s = *doc.scenario;
        j["scenario"] = {{"n_patients", s.n_patients},
                         {"accrual_months", s.accrual_months},
                         {"control_median_os_months", s.control_median_os_months},
                         {"true_os_hr", s.true_os_hr.value()},
                         {"annual_dropout_prob", s.annual_dropout_prob}};
    }
    if (doc.sim) j["sim"] = {{"reps", doc.sim->reps}, {"seed", doc.sim->seed}};
    return j;
}

std::string input_digest(const DesignDocument& doc) {
    const std::string canonical = to_json(doc).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace osmon::app
