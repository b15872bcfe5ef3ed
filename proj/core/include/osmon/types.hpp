#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace osmon {

// Raised for malformed or out-of-range inputs. `field_path` locates the
// offending value inside a design document when known ("milestones[1].deaths").
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& message, std::string field_path = {})
        : std::invalid_argument(message), field_path_(std::move(field_path)) {}

    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

// Raised when inputs are well formed but the request cannot be satisfied
// (unreachable death targets, degenerate configurations).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when a bounded computation exceeds its wall-clock budget.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A probability strictly inside (0, 1).
class Probability {
public:
    explicit Probability(double value) : value_(value) {
        if (!(value > 0.0 && value < 1.0)) {
            throw InputError("probability must lie strictly inside (0, 1), got " +
                             std::to_string(value));
        }
    }

    double value() const noexcept { return value_; }
    double complement() const noexcept { return 1.0 - value_; }

    friend bool operator==(Probability a, Probability b) noexcept { return a.value_ == b.value_; }
    friend auto operator<=>(Probability a, Probability b) noexcept { return a.value_ <=> b.value_; }

private:
    double value_;
};

// Test/control hazard ratio; strictly positive and finite.
class HazardRatio {
public:
    explicit HazardRatio(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw InputError("hazard ratio must be positive and finite, got " +
                             std::to_string(value));
        }
    }

    static HazardRatio from_log(double log_hr) { return HazardRatio(std::exp(log_hr)); }

    double value() const noexcept { return value_; }
    double log() const noexcept { return std::log(value_); }

    friend bool operator==(HazardRatio a, HazardRatio b) noexcept { return a.value_ == b.value_; }
    friend auto operator<=>(HazardRatio a, HazardRatio b) noexcept { return a.value_ <=> b.value_; }

private:
    double value_;
};

// Randomization ratio k for k:1 (test:control) allocation.
class AllocationRatio {
public:
    AllocationRatio() = default;
    explicit AllocationRatio(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw InputError("allocation ratio must be positive and finite, got " +
                             std::to_string(value));
        }
    }

    double value() const noexcept { return value_; }
    // Fraction of patients randomized to the test arm, k / (k + 1).
    double test_fraction() const noexcept { return value_ / (value_ + 1.0); }

    friend bool operator==(AllocationRatio a, AllocationRatio b) noexcept = default;

private:
    double value_ = 1.0;
};

// Inverse variance of a log-HR estimator.
class InformationLevel {
public:
    explicit InformationLevel(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw InputError("information level must be positive and finite");
        }
    }

    double value() const noexcept { return value_; }
    double std_error() const noexcept { return 1.0 / std::sqrt(value_); }

private:
    double value_;
};

}  // namespace osmon
