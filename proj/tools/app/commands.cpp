#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace osmon::app {

using nlohmann::json;

namespace {

std::string hr_label(HazardRatio hr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", hr.value());
    return buf;
}

std::string percent(std::optional<double> pct) {
    if (!pct) return "n/a";
    return fixed(*pct, 0) + "%";
}

std::string analysis_name(const std::string& label, int deaths) {
    return label.empty() ? std::to_string(deaths) + " deaths" : label;
}

Provenance provenance_of(const DesignDocument& doc) {
    return {kToolVersion, input_digest(doc)};
}

std::string markdown_footer(const Provenance& p) {
    return "\n_" + std::string(kToolName) + " " + p.tool_version + ", input " + p.input_digest +
           "_\n";
}

std::string json_artifact(const char* command, const DesignDocument& doc, const Provenance& p,
                          json result) {
    json j;
    j["tool"] = kToolName;
    j["tool_version"] = p.tool_version;
    j["command"] = command;
    j["input_digest"] = p.input_digest;
    j["document"] = to_json(doc);
    j["result"] = std::move(result);
    return j.dump(2) + "\n";
}

class TableWriter {
public:
    explicit TableWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string markdown() const {
        std::ostringstream out;
        line(out, header_);
        out << '|';
        for (std::size_t i = 0; i < header_.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& r : rows_) line(out, r);
        return out.str();
    }

    std::string csv() const {
        std::ostringstream out;
        csv_line(out, header_);
        for (const auto& r : rows_) csv_line(out, r);
        return out.str();
    }

private:
    static void line(std::ostream& out, const std::vector<std::string>& cells) {
        out << '|';
        for (const auto& c : cells) out << ' ' << c << " |";
        out << '\n';
    }

    static void csv_line(std::ostream& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                out << '"';
                for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
                out << '"';
            } else {
                out << c;
            }
        }
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

json probe_list(const std::vector<HazardRatio>& probes) {
    json out = json::array();
    for (const auto& hr : probes) out.push_back(hr.value());
    return out;
}

json errors_json(const std::vector<ProbeError>& errors) {
    json out = json::array();
    for (const auto& e : errors) out.push_back({{"true_hr", e.true_hr.value()}, {"prob", e.error_prob}});
    return out;
}

}  // namespace

Format parse_format(const std::string& name) {
    if (name == "md" || name == "markdown") return Format::markdown;
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw InputError("unknown format '" + name + "' (expected md, csv or json)", "format");
}

std::string fixed(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double rounded = std::floor(value * scale + 0.5) / scale;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded == 0.0 ? 0.0 : rounded);
    return buf;
}

bool DeathsTimeline::any_unreachable() const noexcept {
    for (const auto& m : milestones) {
        if (!m.months) return true;
    }
    return false;
}

void apply_overrides(DesignDocument& doc, std::optional<std::uint64_t> seed,
                     std::optional<int> reps) {
    if (!seed && !reps) return;
    if (!doc.sim) doc.sim = SimSettings{};
    if (seed) doc.sim->seed = *seed;
    if (reps) {
        if (*reps < 1) throw InputError("reps must be positive", "sim.reps");
        doc.sim->reps = *reps;
    }
    if (doc.scenario) doc.scenario->rng_seed = doc.sim->seed;
}

// ---------------------------------------------------------------------------
// Payloads
// ---------------------------------------------------------------------------

json guideline_json(const MonitoringGuideline& guideline) {
    json rows = json::array();
    for (const auto& r : guideline.rows) {
        json probs = json::array();
        for (const auto& p : r.positivity_prob_under) {
            probs.push_back({{"true_hr", p.true_hr.value()}, {"prob", p.positivity_prob}});
        }
        rows.push_back({{"label", r.label},
                        {"deaths", r.deaths},
                        {"final", r.is_final},
                        {"threshold_hr", r.threshold_hr.value()},
                        {"one_sided_fp_rate", r.one_sided_fp_rate.value()},
                        {"ci_level_pct", r.ci_level_pct ? json(*r.ci_level_pct) : json(nullptr)},
                        {"positivity_prob_under", std::move(probs)},
                        {"warning_threshold_exceeds_margin", r.warning_threshold_exceeds_margin}});
    }
    return {{"probe_hrs", probe_list(guideline.probe_hrs)}, {"rows", std::move(rows)}};
}

json oc_json(const OperatingCharacteristics& oc, const std::vector<PowerCurve>& curves) {
    json primary = json::array();
    for (const auto& p : oc.primary) {
        primary.push_back({{"label", p.label},
                           {"deaths", p.deaths},
                           {"threshold_hr", p.threshold.value()},
                           {"fp", p.fp},
                           {"fn", errors_json(p.fn)}});
    }
    json curve_list = json::array();
    for (const auto& c : curves) {
        json points = json::array();
        for (const auto& pt : c.points) points.push_back({pt.true_hr.value(), pt.positivity_prob});
        curve_list.push_back(
            {{"deaths", c.deaths}, {"threshold_hr", c.threshold.value()}, {"points", std::move(points)}});
    }
    return {{"probe_hrs", probe_list(oc.probe_hrs)},
            {"final_deaths", oc.final_deaths},
            {"final_threshold_hr", oc.final_threshold.value()},
            {"fp_final", oc.fp_final},
            {"fn_final", errors_json(oc.fn_final)},
            {"beta_fa", oc.beta_fa},
            {"primary", std::move(primary)},
            {"curves", std::move(curve_list)}};
}

json deaths_json(const DeathsTimeline& timeline) {
    json points = json::array();
    for (const auto& [t, d] : timeline.points) points.push_back({{"months", t}, {"expected_deaths", d}});
    json milestones = json::array();
    for (const auto& m : timeline.milestones) {
        milestones.push_back({{"label", m.label},
                              {"deaths", m.deaths},
                              {"reachable", m.months.has_value()},
                              {"months", m.months ? json(*m.months) : json(nullptr)}});
    }
    return {{"timeline", std::move(points)}, {"milestones", std::move(milestones)}};
}

json empirical_json(const EmpiricalOC& result) {
    json milestones = json::array();
    for (const auto& m : result.milestones) {
        milestones.push_back({{"label", m.label},
                              {"deaths", m.deaths},
                              {"threshold_hr", m.threshold.value()},
                              {"empirical_prob", m.empirical_prob},
                              {"mc_se", m.mc_se},
                              {"analytic_prob", m.analytic_prob},
                              {"met", m.met},
                              {"divergent", m.divergent},
                              {"unreachable", m.unreachable},
                              {"agrees_3se", m.agrees()}});
    }
    return {{"reps", result.reps},
            {"seed", result.seed},
            {"true_hr", result.true_hr.value()},
            {"all_agree_3se", result.all_agree()},
            {"milestones", std::move(milestones)}};
}

json design_result(const DesignDocument& doc) {
    return guideline_json(build_guideline(doc.params, doc.plan, doc.probe_hrs));
}

json oc_result(const DesignDocument& doc) {
    const auto guideline = build_guideline(doc.params, doc.plan, doc.probe_hrs);
    const auto grid = log_uniform_grid();
    return oc_json(analytic_oc(guideline), guideline_curves(guideline, grid));
}

// ---------------------------------------------------------------------------
// Computations behind deaths / simulate
// ---------------------------------------------------------------------------

DeathsTimeline deaths_timeline(const DesignDocument& doc, const DeathsOptions& options) {
    if (!doc.scenario) throw InputError("deaths requires a scenario block", "scenario");
    if (!(options.horizon_months >= 0.0) || !std::isfinite(options.horizon_months)) {
        throw InputError("horizon must be a nonnegative number of months", "horizon_months");
    }
    if (!(options.step_months > 0.0) || !std::isfinite(options.step_months)) {
        throw InputError("step must be a positive number of months", "step_months");
    }
    if (options.horizon_months / options.step_months > 100000.0) {
        throw InputError("timeline would exceed 100000 rows", "step_months");
    }

    DeathsTimeline out;
    const auto count = static_cast<long>(std::floor(options.horizon_months / options.step_months + 1e-9));
    for (long i = 0; i <= count; ++i) {
        const double t = static_cast<double>(i) * options.step_months;
        out.points.emplace_back(t, expected_deaths(*doc.scenario, t));
    }
    for (const auto& m : doc.plan.milestones()) {
        MilestoneTiming timing{m.label, m.deaths, std::nullopt};
        try {
            timing.months = calendar_time_for_deaths(*doc.scenario, m.deaths);
        } catch (const DomainError&) {
        }
        out.milestones.push_back(std::move(timing));
    }
    return out;
}

EmpiricalOC run_simulation(const DesignDocument& doc, const SimulateOptions& options) {
    if (!doc.scenario) throw InputError("simulate requires a scenario block", "scenario");
    if (!doc.sim) throw InputError("simulate requires a sim block", "sim");
    TrialScenario scenario = *doc.scenario;
    scenario.rng_seed = doc.sim->seed;
    EmpiricalOcOptions opts;
    opts.threads = options.threads;
    opts.deadline = options.deadline;
    opts.raw_csv = options.raw_csv;
    return empirical_oc(scenario, doc.params, doc.plan, doc.sim->reps, opts);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

CommandResult cmd_design(const DesignDocument& doc, Format format) {
    const auto guideline = build_guideline(doc.params, doc.plan, doc.probe_hrs);
    const Provenance prov = provenance_of(doc);
    CommandResult result{{format, {}, prov}, kExitOk};

    if (format == Format::json) {
        result.artifact.content = json_artifact("design", doc, prov, guideline_json(guideline));
        return result;
    }

    const bool md = format == Format::markdown;
    std::vector<std::string> header = md ? std::vector<std::string>{"deaths", "threshold HR",
                                                                    "one-sided FP rate",
                                                                    "CI level to rule out delta_null"}
                                         : std::vector<std::string>{"deaths", "threshold",
                                                                    "fp_rate", "ci_level"};
    for (const auto& hr : guideline.probe_hrs) {
        header.push_back(md ? "P(meet; HR=" + hr_label(hr) + ")" : "p_meet_hr_" + hr_label(hr));
    }
    TableWriter table(std::move(header));
    bool any_warning = false;
    for (const auto& r : guideline.rows) {
        std::vector<std::string> cells{std::to_string(r.deaths), fixed(r.threshold_hr.value(), 3),
                                       fixed(r.one_sided_fp_rate.value(), 3),
                                       percent(r.ci_level_pct)};
        if (md && r.warning_threshold_exceeds_margin) {
            cells[1] += " (!)";
            any_warning = true;
        }
        for (const auto& p : r.positivity_prob_under) cells.push_back(fixed(p.positivity_prob, 3));
        table.row(std::move(cells));
    }

    if (md) {
        std::ostringstream out;
        const auto& p = doc.params;
        out << "# OS monitoring guideline\n\n"
            << "delta_null = " << hr_label(p.delta_null) << ", delta_alt = " << hr_label(p.delta_alt)
            << ", gamma_FA = " << p.gamma_fa.value() << ", beta_PA = " << p.beta_pa.value()
            << ", k = " << p.k.value() << "\n\n"
            << table.markdown();
        if (any_warning) {
            out << "\n(!) threshold at or above delta_null: the one-sided false-positive rate is "
                   "0.5 or more, so no two-sided CI level applies.\n";
        }
        out << markdown_footer(prov);
        result.artifact.content = out.str();
    } else {
        result.artifact.content = table.csv();
    }
    return result;
}

CommandResult cmd_oc(const DesignDocument& doc, Format format) {
    const auto guideline = build_guideline(doc.params, doc.plan, doc.probe_hrs);
    const auto oc = analytic_oc(guideline);
    const Provenance prov = provenance_of(doc);
    CommandResult result{{format, {}, prov}, kExitOk};

    if (format == Format::json) {
        const auto grid = log_uniform_grid();
        result.artifact.content =
            json_artifact("oc", doc, prov, oc_json(oc, guideline_curves(guideline, grid)));
        return result;
    }

    const bool md = format == Format::markdown;
    std::vector<std::string> header{"analysis", "role", "deaths", md ? "threshold HR" : "threshold",
                                    md ? "P(false positive; delta_null)" : "false_positive"};
    for (const auto& hr : oc.probe_hrs) {
        header.push_back(md ? "P(false negative; HR=" + hr_label(hr) + ")"
                            : "false_negative_hr_" + hr_label(hr));
    }
    TableWriter table(std::move(header));
    auto add = [&](const std::string& label, const char* role, int deaths, HazardRatio threshold,
                   double fp, const std::vector<ProbeError>& fn) {
        std::vector<std::string> cells{analysis_name(label, deaths), role, std::to_string(deaths),
                                       fixed(threshold.value(), 3), fixed(fp, 3)};
        for (const auto& e : fn) cells.push_back(fixed(e.error_prob, 3));
        table.row(std::move(cells));
    };
    for (const auto& p : oc.primary) add(p.label, "primary", p.deaths, p.threshold, p.fp, p.fn);
    add(doc.plan.final_milestone().label, "final", oc.final_deaths, oc.final_threshold, oc.fp_final,
        oc.fn_final);

    if (md) {
        std::ostringstream out;
        out << "# Operating characteristics\n\n"
            << table.markdown() << "\nbeta_FA (final-analysis false-negative rate under delta_alt) = "
            << fixed(oc.beta_fa, 3) << "\n"
            << markdown_footer(prov);
        result.artifact.content = out.str();
    } else {
        result.artifact.content = table.csv();
    }
    return result;
}

CommandResult cmd_deaths(const DesignDocument& doc, Format format, const DeathsOptions& options) {
    const auto timeline = deaths_timeline(doc, options);
    const Provenance prov = provenance_of(doc);
    CommandResult result{{format, {}, prov},
                         timeline.any_unreachable() ? kExitDomainError : kExitOk};

    if (format == Format::json) {
        json payload = deaths_json(timeline);
        payload["horizon_months"] = options.horizon_months;
        payload["step_months"] = options.step_months;
        result.artifact.content = json_artifact("deaths", doc, prov, std::move(payload));
        return result;
    }

    if (format == Format::csv) {
        TableWriter table({"kind", "label", "months", "deaths"});
        for (const auto& [t, d] : timeline.points) table.row({"timeline", "", fixed(t, 2), fixed(d, 2)});
        for (const auto& m : timeline.milestones) {
            table.row({"milestone", m.label, m.months ? fixed(*m.months, 2) : "unreachable",
                       std::to_string(m.deaths)});
        }
        result.artifact.content = table.csv();
        return result;
    }

    TableWriter points({"months", "expected deaths"});
    for (const auto& [t, d] : timeline.points) points.row({fixed(t, 2), fixed(d, 2)});
    TableWriter milestones({"analysis", "deaths", "calendar months"});
    for (const auto& m : timeline.milestones) {
        milestones.row({analysis_name(m.label, m.deaths), std::to_string(m.deaths),
                        m.months ? fixed(*m.months, 2) : "unreachable"});
    }
    std::ostringstream out;
    out << "# Expected deaths\n\n" << points.markdown() << "\n## Milestones\n\n"
        << milestones.markdown() << markdown_footer(prov);
    result.artifact.content = out.str();
    return result;
}

CommandResult cmd_simulate(const DesignDocument& doc, Format format, const SimulateOptions& options) {
    const auto sim = run_simulation(doc, options);
    const Provenance prov = provenance_of(doc);
    CommandResult result{{format, {}, prov}, kExitOk};

    if (format == Format::json) {
        result.artifact.content = json_artifact("simulate", doc, prov, empirical_json(sim));
        return result;
    }

    const bool md = format == Format::markdown;
    TableWriter table(md ? std::vector<std::string>{"deaths", "threshold HR", "empirical P(meet)",
                                                    "MC SE", "analytic P(meet)", "divergent fits",
                                                    "unreachable", "within 3 MC SE"}
                         : std::vector<std::string>{"deaths", "threshold", "empirical", "mc_se",
                                                    "analytic", "divergent", "unreachable",
                                                    "agree_3se"});
    for (const auto& m : sim.milestones) {
        table.row({std::to_string(m.deaths), fixed(m.threshold.value(), 3),
                   fixed(m.empirical_prob, 3), fixed(m.mc_se, 4), fixed(m.analytic_prob, 3),
                   std::to_string(m.divergent), std::to_string(m.unreachable),
                   m.agrees() ? "pass" : "fail"});
    }
    if (md) {
        std::ostringstream out;
        out << "# Monte Carlo check of positivity probabilities\n\n"
            << sim.reps << " replications, seed " << sim.seed << ", true HR "
            << hr_label(sim.true_hr) << "\n\n"
            << table.markdown() << markdown_footer(prov);
        result.artifact.content = out.str();
    } else {
        result.artifact.content = table.csv();
    }
    return result;
}

}  // namespace osmon::app
