#include "osmon/cox.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace osmon {

namespace {

constexpr double kScoreTolerance = 1e-8;
constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 40;
constexpr double kMaxStep = 1.0;
const double kDivergenceBound = std::log(50.0);

// Risk-set summary at one distinct event time.
struct EventTime {
    double deaths;
    double test_deaths;
    double control_at_risk;
    double test_at_risk;
};

struct Derivatives {
    double loglik;
    double score;
    double information;
};

std::vector<EventTime> summarize(std::span<const SurvivalRecord> records) {
    std::vector<const SurvivalRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const SurvivalRecord* a, const SurvivalRecord* b) { return a->time > b->time; });

    // Walk from the longest time down so the at-risk counts accumulate.
    std::vector<EventTime> out;
    double at_risk[2] = {0.0, 0.0};
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double t = sorted[i]->time;
        double deaths = 0.0;
        double test_deaths = 0.0;
        for (; i < sorted.size() && sorted[i]->time == t; ++i) {
            const bool is_test = sorted[i]->arm == Arm::test;
            at_risk[is_test ? 1 : 0] += 1.0;
            if (sorted[i]->event) {
                deaths += 1.0;
                if (is_test) test_deaths += 1.0;
            }
        }
        if (deaths > 0.0) out.push_back({deaths, test_deaths, at_risk[0], at_risk[1]});
    }
    return out;
}

Derivatives evaluate(const std::vector<EventTime>& events, double beta) {
    Derivatives d{0.0, 0.0, 0.0};
    const double w = std::exp(beta);
    for (const auto& e : events) {
        const double denom = e.control_at_risk + e.test_at_risk * w;
        const double share = e.test_at_risk * w / denom;
        d.loglik += e.test_deaths * beta - e.deaths * std::log(denom);
        d.score += e.test_deaths - e.deaths * share;
        d.information += e.deaths * share * (1.0 - share);
    }
    return d;
}

}  // namespace

EstimateResult estimate_log_hr(std::span<const SurvivalRecord> records) {
    EstimateResult result;
    const auto events = summarize(records);

    double total_deaths = 0.0;
    double test_deaths = 0.0;
    for (const auto& e : events) {
        total_deaths += e.deaths;
        test_deaths += e.test_deaths;
    }
    if (test_deaths == 0.0 || test_deaths == total_deaths) {
        result.reason = "no deaths in one arm";
        return result;
    }

    double beta = 0.0;
    Derivatives cur = evaluate(events, beta);
    bool polished = false;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        result.iterations = iter;
        if (!(cur.information > 0.0) || !std::isfinite(cur.score)) {
            result.reason = "singular information";
            return result;
        }
        const bool within_tolerance = std::abs(cur.score) < kScoreTolerance;
        double step = std::clamp(cur.score / cur.information, -kMaxStep, kMaxStep);
        // Once within tolerance take one more full Newton step, then stop.
        if (within_tolerance) {
            if (polished) break;
            polished = true;
        }
        Derivatives next = evaluate(events, beta + step);
        // Halve only on a decrease beyond rounding noise of the log-likelihood.
        const double slack = 1e-12 * (1.0 + std::abs(cur.loglik));
        for (int h = 0; h < kMaxHalvings && !within_tolerance && next.loglik < cur.loglik - slack;
             ++h) {
            step *= 0.5;
            next = evaluate(events, beta + step);
        }
        beta += step;
        cur = next;
        if (std::abs(beta) > kDivergenceBound) {
            result.log_hr = beta;
            result.reason = "log hazard ratio diverged beyond log(50)";
            return result;
        }
    }

    if (!(std::abs(cur.score) < kScoreTolerance) || !(cur.information > 0.0)) {
        result.log_hr = beta;
        result.reason = "Newton iteration did not reach score tolerance";
        return result;
    }
    result.log_hr = beta;
    result.std_err = 1.0 / std::sqrt(cur.information);
    result.converged = true;
    return result;
}

}  // namespace osmon
