#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "../support/documents.hpp"
#include "app/commands.hpp"
#include "app/document.hpp"
#include "app/service.hpp"

using namespace osmon::app;
using nlohmann::json;

namespace {

json cli_result(const json& document, const std::string& command) {
    const auto doc = parse_document(document);
    CommandResult r;
    if (command == "design") r = cmd_design(doc, Format::json);
    if (command == "oc") r = cmd_oc(doc, Format::json);
    if (command == "deaths") r = cmd_deaths(doc, Format::json);
    if (command == "simulate") r = cmd_simulate(doc, Format::json);
    return json::parse(r.artifact.content)["result"];
}

}  // namespace

TEST_CASE("guideline endpoint") {
    const auto r = handle_guideline(fixtures::table6_doc().dump());
    REQUIRE(r.status == 200);
    CHECK(r.body["tool_version"] == kToolVersion);
    CHECK(r.body["resolved"]["delta_null"] == 1.333);
    const auto& rows = r.body["result"]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[0]["threshold_hr"].get<double>() - 1.209) < 0.001);
    CHECK(std::abs(rows[1]["threshold_hr"].get<double>() - 0.999) < 0.001);
    CHECK(std::abs(rows[1]["positivity_prob_under"][1]["prob"].get<double>() - 0.558) < 0.001);
    CHECK(handle_guideline(fixtures::table6_doc().dump()).body == r.body);
    CHECK(r.body["result"] == cli_result(fixtures::table6_doc(), "design"));
}

TEST_CASE("validation errors are 400 with field paths") {
    json j = fixtures::table6_doc();
    j["gamma_fa"] = 0.6;
    const auto r = handle_guideline(j.dump());
    CHECK(r.status == 400);
    CHECK(r.body["code"] == "validation_error");
    CHECK(r.body["field_path"] == "gamma_fa");
    CHECK_FALSE(r.body["message"].get<std::string>().empty());

    j = fixtures::table3_doc();
    j["k"] = -2;
    const auto k = handle_oc(j.dump());
    CHECK(k.status == 400);
    CHECK(k.body["field_path"] == "k");

    CHECK(handle_oc("not json").status == 400);
    CHECK(handle_deaths(fixtures::table3_doc().dump()).status == 400);
}

TEST_CASE("oc endpoint") {
    const auto r = handle_oc(fixtures::table3_doc().dump());
    REQUIRE(r.status == 200);
    CHECK(std::abs(r.body["result"]["fp_final"].get<double>() - 0.025) < 1e-12);
    for (const auto& p : r.body["result"]["primary"]) {
        CHECK(std::abs(p["fn"][0]["prob"].get<double>() - 0.1) < 1e-10);
    }
    CHECK(r.body["result"] == cli_result(fixtures::table3_doc(), "oc"));
}

TEST_CASE("deaths endpoint") {
    json body = fixtures::table6_doc();
    const auto r = handle_deaths(body.dump());
    REQUIRE(r.status == 200);
    CHECK(r.body["result"]["timeline"][0]["expected_deaths"] == 0.0);
    CHECK(r.body["result"] == cli_result(body, "deaths"));

    body["horizon_months"] = 24;
    body["step_months"] = 12;
    CHECK(handle_deaths(body.dump()).body["result"]["timeline"].size() == 3);

    json heavy = fixtures::table6_doc();
    heavy["scenario"]["annual_dropout_prob"] = 0.95;
    const auto u = handle_deaths(heavy.dump());
    CHECK(u.status == 422);
    CHECK(u.body["code"] == "domain_error");
}

TEST_CASE("simulate endpoint") {
    const auto body = fixtures::table4_doc();
    const auto a = handle_simulate(body.dump());
    REQUIRE(a.status == 200);
    CHECK(handle_simulate(body.dump()).body == a.body);
    CHECK(a.body["result"] == cli_result(body, "simulate"));

    ServiceConfig capped;
    capped.max_reps = 150;
    const auto over = handle_simulate(body.dump(), capped);
    CHECK(over.status == 422);
    CHECK(over.body["code"] == "domain_error");

    ServiceConfig rushed;
    rushed.simulate_budget = std::chrono::milliseconds(0);
    json big = body;
    big["sim"]["reps"] = 20000;
    const auto late = handle_simulate(big.dump(), rushed);
    CHECK(late.status == 504);
    CHECK(late.body["code"] == "budget_exceeded");
}

TEST_CASE("health") {
    const auto h = health();
    CHECK(h.status == 200);
    CHECK(h.body["status"] == "ok");
    CHECK(h.body["version"] == kToolVersion);
    CHECK(health().body == h.body);
}

TEST_CASE("HTTP server round trip") {
    Server server;
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    auto h = client.Get("/api/v1/health");
    REQUIRE(h);
    CHECK(h->status == 200);
    CHECK(json::parse(h->body)["status"] == "ok");

    const auto doc = fixtures::table6_doc().dump();
    auto g = client.Post("/api/v1/guideline", doc, "application/json");
    REQUIRE(g);
    CHECK(g->status == 200);
    CHECK(json::parse(g->body) == handle_guideline(doc).body);

    json bad = fixtures::table6_doc();
    bad["gamma_fa"] = 0.6;
    auto e = client.Post("/api/v1/oc", bad.dump(), "application/json");
    REQUIRE(e);
    CHECK(e->status == 400);
    CHECK(json::parse(e->body)["field_path"] == "gamma_fa");

    auto missing = client.Get("/api/v1/nothing");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    thread.join();
    CHECK_FALSE(server.is_running());
}
