#pragma once

// Brute-force maximization of the Breslow partial likelihood for a single
// binary covariate, written directly from its definition.

#include <cmath>
#include <vector>

namespace oracle {

struct Obs {
    double time;
    bool event;
    int arm;  // 1 = test
};

inline double breslow_loglik(const std::vector<Obs>& data, double beta) {
    double ll = 0.0;
    for (const auto& i : data) {
        if (!i.event) continue;
        double denom = 0.0;
        for (const auto& j : data) {
            if (j.time >= i.time) denom += std::exp(beta * j.arm);
        }
        ll += beta * i.arm - std::log(denom);
    }
    return ll;
}

// Successively refined grid search over [-lo, hi]; returns the maximizer.
inline double grid_argmax(const std::vector<Obs>& data, double lo = -5.0, double hi = 5.0) {
    double best = lo;
    double step = 0.01;
    for (int level = 0; level < 8; ++level) {
        double best_ll = -INFINITY;
        for (double b = lo; b <= hi + 1e-15; b += step) {
            const double ll = breslow_loglik(data, b);
            if (ll > best_ll) {
                best_ll = ll;
                best = b;
            }
        }
        lo = best - step;
        hi = best + step;
        step /= 10.0;
    }
    return best;
}

// Observed information by central second difference.
inline double numeric_information(const std::vector<Obs>& data, double beta, double h = 1e-4) {
    return -(breslow_loglik(data, beta + h) - 2.0 * breslow_loglik(data, beta) +
             breslow_loglik(data, beta - h)) /
           (h * h);
}

}  // namespace oracle
