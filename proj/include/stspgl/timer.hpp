#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace stspgl {

/// Wall-clock budget. An infinite budget never expires.
class Deadline {
public:
    using clock = std::chrono::steady_clock;

    explicit Deadline(double seconds = std::numeric_limits<double>::infinity())
        : start_(clock::now()), budget_(seconds) {}

    double elapsed() const { return std::chrono::duration<double>(clock::now() - start_).count(); }
    double remaining() const {
        if (!std::isfinite(budget_)) return budget_;
        return std::max(0.0, budget_ - elapsed());
    }
    bool expired() const { return std::isfinite(budget_) && elapsed() >= budget_; }
    /// Remaining time capped by `cap`.
    double limit(double cap) const { return std::min(remaining(), cap); }

private:
    clock::time_point start_;
    double budget_;
};

}  // namespace stspgl
