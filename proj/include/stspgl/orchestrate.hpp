#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "stspgl/model.hpp"
#include "stspgl/timer.hpp"
#include "stspgl/tspgl.hpp"

namespace stspgl {

struct SearchConfig {
    double time_limit_total = 3600.0;
    double rmp_time_limit = 2400.0;
    double pricing_time_limit = 1200.0;
    /// Relative gap at which B&P and the MIP stop. Zero drives to optimality.
    double gap_target = 0.02;
    int pricing_per_iteration = 5;
    int evals_per_iteration = 5;
    /// Node-cover size for exploration; 0 draws it per call.
    int explore_size = 0;
    /// Exploration draws seeding the hybrid pool.
    int explore_initial = 5;
    std::uint64_t seed = 1;
    bool minimality_cuts = false;
    /// Outer-iteration cap (0 = none). The heuristic also stops after
    /// `stall_limit` consecutive iterations without a new cover.
    int max_iterations = 0;
    int stall_limit = 100;
    DualMode dual_mode = DualMode::Fast;
    /// Experimental: column generation to convergence before each single
    /// evaluation, without bound-based discarding.
    bool original_bp = false;
    std::ostream* cg_log = nullptr;
    std::ostream* cut_log = nullptr;

    /// Throws ParameterError on out-of-range settings.
    void validate() const;
};

struct QueueEntry {
    RequestSet cover;
    double lb = 0.0;
    double ub = 0.0;
    BoundEstimate bounds;
};

/// Covers ordered by (ub, lb, cover) ascending.
class ScoredQueue {
public:
    void push(QueueEntry entry);
    QueueEntry pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    /// Up to `k` best entries, best first, without removing them.
    std::vector<QueueEntry> peek(std::size_t k) const;

private:
    struct Later {
        bool operator()(const QueueEntry& a, const QueueEntry& b) const;
    };
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, Later> heap_;
};

/// Incumbent, bounds and trace of one search.
struct SearchState {
    Deadline clock;
    double upper_bound = std::numeric_limits<double>::infinity();
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::optional<TspGlSolution> incumbent;
    std::optional<RequestSet> cover;
    SolveTrace trace;

    explicit SearchState(double time_limit = std::numeric_limits<double>::infinity()) : clock(time_limit) {}
    void record(const std::string& event);
    /// Raises the lower bound (capped at the upper bound); true on increase.
    bool raise_lower_bound(double lb);
};

/// Replaces the incumbent iff `sol` beats the upper bound by more than 1e-9.
bool update_incumbent(SearchState& state, const RequestSet& cover, const TspGlSolution& sol);

StspGlResult run_mip_benchmark(const Instance& inst, const SearchConfig& cfg);
StspGlResult run_bp(const Instance& inst, const SearchConfig& cfg);
StspGlResult run_heuristic(const Instance& inst, const SearchConfig& cfg);
StspGlResult run_hybrid(const Instance& inst, const SearchConfig& cfg);

/// Dispatch by name: mip, bp, heuristic, hybrid, deterministic (B&P on the
/// mean scenario).
StspGlResult run_method(const Instance& inst, const std::string& method, const SearchConfig& cfg);

}  // namespace stspgl
