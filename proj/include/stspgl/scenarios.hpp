#pragma once

#include <cstdint>
#include <vector>

#include "stspgl/model.hpp"

namespace stspgl {

/// Deterministic-equivalent routing costs q~_ij^hk = c_ij * w_hk with
/// w_hk = (1/|S|) sum_s s^hk / (theta * sum_{(u,v) in D} s^uv).
/// Only the per-request weights are stored; the arc factor comes from the
/// instance travel times.
class RoutingCostTable {
public:
    RoutingCostTable() = default;
    RoutingCostTable(SquareMatrix travel_time, std::vector<double> weights)
        : travel_(std::move(travel_time)), weights_(std::move(weights)) {}

    double operator()(int i, int j, int request) const { return travel_(i, j) * weights_[request]; }
    double weight(int request) const { return weights_[request]; }
    const std::vector<double>& weights() const { return weights_; }
    int num_requests() const { return static_cast<int>(weights_.size()); }

private:
    SquareMatrix travel_;
    std::vector<double> weights_;
};

/// Builds the q~ table.
/// Throws ParameterError when theta == 0 or a scenario has no demand.
RoutingCostTable deterministic_routing_costs(const Instance& inst);

/// Per-scenario flags: service level met (true) or not.
using SatisfactionVector = std::vector<bool>;

inline constexpr double kSatisfactionTolerance = 1e-9;

/// True iff the demand of `cover` in `scenario` reaches theta times the
/// scenario total (within 1e-9).
bool scenario_satisfied(const Instance& inst, const RequestSet& cover, int scenario);
bool scenario_satisfied(const Instance& inst, const RequestSet& cover, int scenario, double theta);

/// Smallest integer count with count >= (1 - rho) |S|.
int required_scenario_count(int num_scenarios, double rho);

struct ChanceCheck {
    bool feasible = false;
    SatisfactionVector satisfied;
};

ChanceCheck chance_feasible(const Instance& inst, const RequestSet& cover);
/// Shorthand for chance_feasible(...).feasible without building the vector.
bool is_feasibility_cover(const Instance& inst, const RequestSet& cover);

/// Single-scenario copy carrying the mean demand of every request.
Instance mean_scenario(const Instance& inst);

struct MetricsRow {
    int nodes = 0;
    double theta = 0.0;
    double rho = 0.0;
    double design_cost = 0.0;
    double nbar = 0.0;    // visited / |N|
    double dbar = 0.0;    // mean served share of demand
    double rhobar = 0.0;  // share of scenarios missing the service level
    bool infeasible = false;
};

/// Scores a tour against the scenarios of `inst`. A request counts as served
/// whenever both of its endpoints are on the tour.
MetricsRow evaluate_metrics(const Instance& inst, const TspGlSolution& sol);

/// Requests whose endpoints both lie in `nodes` (sorted).
RequestSet induced_requests(const Instance& inst, const NodeSet& nodes);

struct GeneratorOptions {
    int nodes = 10;
    int requests = 12;
    int scenarios = 5;
    double theta = 0.9;
    double rho = 0.1;
    double alpha = 0.25;
    std::uint64_t seed = 1;
    double p_present = 0.8;
    int demand_low = 1;
    int demand_high = 10;
    double coord_max = 1000.0;
    /// Compulsory count; 0 selects ceil(0.2 * nodes).
    int compulsory = 0;
};

/// Random instance: uniform planar coordinates with EUC_2D rounding (points
/// resampled until the rounded metric keeps the triangle inequality),
/// compulsory stops drawn uniformly, requests without replacement and
/// Bernoulli(p_present) * U{low..high} demand per scenario.
Instance generate_instance(const GeneratorOptions& opts);

/// Same request and demand sampling over given coordinates (e.g. a TSPLIB
/// file); `opts.nodes` is ignored. The rounded metric is not repaired.
Instance generate_instance(const GeneratorOptions& opts, std::vector<Point> points);

}  // namespace stspgl
