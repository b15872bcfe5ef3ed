#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "document.hpp"
#include "service.hpp"

namespace osmon::app {

namespace {

struct CommonArgs {
    std::string document;
    std::string format = "md";
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("document", args.document, "Design document (json)")->required();
    cmd->add_option("--format", args.format, "Output format: md, csv or json")
        ->capture_default_str();
    cmd->add_option("--out", args.out_path, "Write output to PATH instead of stdout");
    cmd->add_option("--seed", args.seed, "Override sim.seed");
    cmd->add_option("--reps", args.reps, "Override sim.reps");
}

int emit(const CommandResult& result, const std::string& out_path, std::ostream& out,
         std::ostream& err) {
    if (out_path.empty()) {
        out << result.artifact.content;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot write '" << out_path << "'\n";
            return kExitInputError;
        }
        file << result.artifact.content;
    }
    return result.exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design, evaluate and verify overall-survival monitoring guidelines", "osmon"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonArgs args;
    DeathsOptions deaths_options;
    unsigned threads = 0;
    std::string raw_csv_path;
    std::string host = "127.0.0.1";
    int port = 8080;
    ServiceConfig service_config;
    double budget_seconds = 60.0;

    auto* design = app.add_subcommand("design", "Render the monitoring guideline table");
    add_common(design, args);
    auto* oc = app.add_subcommand("oc", "Render analytic operating characteristics");
    add_common(oc, args);
    auto* deaths = app.add_subcommand("deaths", "Expected-death timeline and milestone timing");
    add_common(deaths, args);
    deaths->add_option("--horizon", deaths_options.horizon_months, "Timeline horizon (months)")
        ->capture_default_str();
    deaths->add_option("--step", deaths_options.step_months, "Timeline step (months)")
        ->capture_default_str();
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of positivity probabilities");
    add_common(simulate, args);
    simulate->add_option("--threads", threads, "Worker threads (0: all cores)");
    simulate->add_option("--raw-csv", raw_csv_path, "Write replication-level rows to PATH");
    auto* serve = app.add_subcommand("serve", "Serve the /api/v1 HTTP interface");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--max-reps", service_config.max_reps)->capture_default_str();
    serve->add_option("--budget-seconds", budget_seconds)->capture_default_str();
    serve->add_option("--threads", service_config.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (serve->parsed()) {
            service_config.simulate_budget = std::chrono::milliseconds(
                static_cast<long long>(budget_seconds * 1000.0));
            Server server(service_config);
            const int bound = server.bind(host, port);
            if (bound < 0) {
                err << "error: cannot bind " << host << ':' << port << '\n';
                return kExitInputError;
            }
            err << "osmon " << kToolVersion << " listening on http://" << host << ':' << bound
                << "/api/v1\n";
            server.listen();
            return kExitOk;
        }

        const Format format = parse_format(args.format);
        DesignDocument doc = load_document_file(args.document);
        apply_overrides(doc, args.seed, args.reps);

        if (design->parsed()) return emit(cmd_design(doc, format), args.out_path, out, err);
        if (oc->parsed()) return emit(cmd_oc(doc, format), args.out_path, out, err);
        if (deaths->parsed()) {
            const auto result = cmd_deaths(doc, format, deaths_options);
            const int code = emit(result, args.out_path, out, err);
            if (result.exit_code == kExitDomainError) {
                err << "error: at least one milestone is unreachable under the scenario\n";
            }
            return code;
        }
        if (simulate->parsed()) {
            SimulateOptions options;
            options.threads = threads;
            std::ofstream raw;
            if (!raw_csv_path.empty()) {
                raw.open(raw_csv_path, std::ios::binary);
                if (!raw) throw InputError("cannot write '" + raw_csv_path + "'", "raw-csv");
                options.raw_csv = &raw;
            }
            return emit(cmd_simulate(doc, format, options), args.out_path, out, err);
        }
    } catch (const InputError& e) {
        err << "input error";
        if (!e.field_path().empty()) err << " at " << e.field_path();
        err << ": " << e.what() << '\n';
        return kExitInputError;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const BudgetExceeded& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitDomainError;
    } catch (const std::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace osmon::app
