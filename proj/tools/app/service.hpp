#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <json.hpp>

namespace osmon::app {

struct ServiceConfig {
    int max_reps = 200000;
    std::chrono::milliseconds simulate_budget{60000};
    unsigned threads = 0;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// Endpoint handlers over raw request bodies. Successful payloads carry
// {tool_version, resolved, result}; `result` matches the "result" member of
// the corresponding CLI json artifact. Errors carry {code, message,
// field_path?} with status 400 (validation), 422 (domain) or 504 (budget).
ApiResponse handle_guideline(const std::string& body, const ServiceConfig& config = {});
ApiResponse handle_oc(const std::string& body, const ServiceConfig& config = {});
ApiResponse handle_deaths(const std::string& body, const ServiceConfig& config = {});
ApiResponse handle_simulate(const std::string& body, const ServiceConfig& config = {});
ApiResponse health();

// HTTP front end: POST /api/v1/{guideline,oc,deaths,simulate}, GET /api/v1/health.
class Server {
public:
    explicit Server(ServiceConfig config = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds to `port` (0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks serving requests until stop().
    bool listen();
    void stop();
    bool is_running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace osmon::app
