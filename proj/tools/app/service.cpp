#include "service.hpp"

#include <httplib.h>

#include "commands.hpp"
#include "document.hpp"

namespace osmon::app {

using nlohmann::json;

namespace {

ApiResponse error(int status, const char* code, const std::string& message,
                  const std::string& field_path = {}) {
    json body{{"code", code}, {"message", message}};
    if (!field_path.empty()) body["field_path"] = field_path;
    return {status, std::move(body)};
}

ApiResponse ok(const DesignDocument& doc, json result) {
    return {200, {{"tool_version", kToolVersion}, {"resolved", to_json(doc)}, {"result", std::move(result)}}};
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed json: ") + e.what());
    }
}

template <typename Fn>
ApiResponse guarded(const std::string& body, Fn&& fn) {
    try {
        const json j = parse_body(body);
        return fn(j, parse_document(j));
    } catch (const InputError& e) {
        return error(400, "validation_error", e.what(), e.field_path());
    } catch (const DomainError& e) {
        return error(422, "domain_error", e.what());
    } catch (const BudgetExceeded& e) {
        return error(504, "budget_exceeded", e.what());
    } catch (const std::exception& e) {
        return error(400, "validation_error", e.what());
    }
}

double optional_number(const json& j, const char* key, double fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw InputError("expected a number", key);
    return it->get<double>();
}

}  // namespace

ApiResponse handle_guideline(const std::string& body, const ServiceConfig&) {
    return guarded(body, [](const json&, const DesignDocument& doc) {
        return ok(doc, design_result(doc));
    });
}

ApiResponse handle_oc(const std::string& body, const ServiceConfig&) {
    return guarded(body, [](const json&, const DesignDocument& doc) {
        return ok(doc, oc_result(doc));
    });
}

ApiResponse handle_deaths(const std::string& body, const ServiceConfig&) {
    return guarded(body, [](const json& j, const DesignDocument& doc) {
        DeathsOptions options;
        options.horizon_months = optional_number(j, "horizon_months", options.horizon_months);
        options.step_months = optional_number(j, "step_months", options.step_months);
        const auto timeline = deaths_timeline(doc, options);
        for (const auto& m : timeline.milestones) {
            if (!m.months) {
                throw DomainError("milestone of " + std::to_string(m.deaths) +
                                  " deaths is unreachable under the scenario");
            }
        }
        json payload = deaths_json(timeline);
        payload["horizon_months"] = options.horizon_months;
        payload["step_months"] = options.step_months;
        return ok(doc, std::move(payload));
    });
}

ApiResponse handle_simulate(const std::string& body, const ServiceConfig& config) {
    return guarded(body, [&config](const json&, const DesignDocument& doc) {
        if (doc.sim && doc.sim->reps > config.max_reps) {
            throw DomainError("reps " + std::to_string(doc.sim->reps) + " exceeds the server cap of " +
                              std::to_string(config.max_reps));
        }
        SimulateOptions options;
        options.threads = config.threads;
        options.deadline = std::chrono::steady_clock::now() + config.simulate_budget;
        return ok(doc, empirical_json(run_simulation(doc, options)));
    });
}

ApiResponse health() {
    return {200, {{"status", "ok"}, {"ready", true}, {"tool", kToolName}, {"version", kToolVersion}}};
}

struct Server::Impl {
    ServiceConfig config;
    httplib::Server http;
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
    auto reply = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body.dump(), "application/json");
    };
    auto route = [this, reply](const char* path, ApiResponse (*handler)(const std::string&,
                                                                        const ServiceConfig&)) {
        impl_->http.Post(path, [this, reply, handler](const httplib::Request& req, httplib::Response& res) {
            reply(res, handler(req.body, impl_->config));
        });
    };
    route("/api/v1/guideline", &handle_guideline);
    route("/api/v1/oc", &handle_oc);
    route("/api/v1/deaths", &handle_deaths);
    route("/api/v1/simulate", &handle_simulate);
    impl_->http.Get("/api/v1/health", [reply](const httplib::Request&, httplib::Response& res) {
        reply(res, health());
    });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool Server::is_running() const { return impl_->http.is_running(); }

}  // namespace osmon::app
