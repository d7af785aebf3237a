#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stspgl/model.hpp"
#include "stspgl/mp.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

/// TSP-GL restricted to a cover: node set N'(Q) and the requests of Q.
/// Holds references to the instance and cost table.
struct SubInstance {
    const Instance* inst = nullptr;
    const RoutingCostTable* qtilde = nullptr;
    RequestSet cover;
    NodeSet nodes;

    static SubInstance make(const Instance& inst, const RoutingCostTable& qtilde, RequestSet cover);
    int size() const { return static_cast<int>(nodes.size()); }
};

struct TspTour {
    std::vector<int> tour;
    double value = 0.0;
    /// Subtours met while solving (each a node set), for cut caching.
    std::vector<NodeSet> subtours;
};

/// Largest node count solved by Held-Karp dynamic programming.
inline constexpr int kHeldKarpMaxNodes = 15;

/// A solve stopped by its time limit before producing what was asked for.
class TimeLimitError : public Error {
public:
    using Error::Error;
};

/// Exact symmetric TSP over `nodes` with costs from `costs`. One node gives
/// value 0; two nodes give 2 c. Held-Karp up to kHeldKarpMaxNodes nodes,
/// beyond that a degree-two MIP with subtour elimination rounds.
TspTour symmetric_tsp(const NodeSet& nodes, const SquareMatrix& costs, double time_limit = mp::kInf);

/// Held-Karp dynamic program; exposed for tests.
TspTour held_karp(const NodeSet& nodes, const SquareMatrix& costs);

struct BoundEstimate {
    double lb_design = 0.0;
    std::vector<double> lb_routing;  // per request of the cover, q~_hk^hk
    std::vector<double> ub_routing;  // per request, shortest path on the TSP tour
    double lb = 0.0;
    double ub = 0.0;
    TspTour tsp;
};

/// Cheap bracket of the TSP-GL value of a cover: TSP on N'(Q) plus direct
/// arcs (lower) or tour paths (upper).
BoundEstimate cover_bounds(const SubInstance& sub, double alpha);
BoundEstimate cover_bounds(const SubInstance& sub, double alpha, double time_limit);

struct PathResult {
    bool feasible = false;
    std::vector<ArcFlow> arcs;
    double cost = 0.0;
};

/// Unit min-cost flow of `request` over the arcs of `xbar` (edges may repeat),
/// weights q~. Infeasible when origin and destination are not connected.
PathResult primal_subproblem(const std::vector<Edge>& xbar, int request, const Instance& inst,
                             const RoutingCostTable& qtilde);

enum class DualMode { Fast, Lp };

/// Optimal dual (p, lambda) of the flow subproblem over the arcs among `nodes`.
struct BendersDuals {
    int request = 0;
    NodeSet nodes;
    std::vector<double> p;       // per position in `nodes`
    std::vector<double> lambda;  // lambda[a * m + b] for arc (nodes[a], nodes[b])
    double objective = 0.0;
    bool feasible = false;

    double lambda_bar(int a, int b) const;
};

BendersDuals dual_subproblem(const std::vector<Edge>& xbar, int request, const NodeSet& nodes, const Instance& inst,
                             const RoutingCostTable& qtilde, DualMode mode = DualMode::Fast);

/// Connected components of an edge set when there is more than one.
std::vector<NodeSet> find_subtours(const std::vector<Edge>& edges);

/// eta^h + sum_e coef_e x_e >= rhs.
struct OptimalityCut {
    int origin = 0;
    std::map<Edge, double> coefficients;
    double rhs = 0.0;

    /// Right side minus the x part: the bound this cut puts on eta^h at x.
    double bound_at(const std::vector<Edge>& tour_edges) const;
};

/// Aggregates the duals of all cover requests sharing `origin`.
OptimalityCut aggregated_optimality_cut(const std::vector<BendersDuals>& duals, int origin, const Instance& inst);

/// Subtour cut cache keyed by node set, shared across TSP-GL solves.
class CutPool {
public:
    void add(const NodeSet& key, const std::vector<NodeSet>& subtours);
    /// Subtours usable for a tour over exactly `nodes`: cached sets that are
    /// proper subsets of `nodes` with at least two members.
    std::vector<NodeSet> subtours_for(const NodeSet& nodes) const;
    std::size_t size() const;

    /// Optional debug log, one cut per line.
    void set_log(std::ostream* log) { log_ = log; }
    void log_line(const std::string& line);

private:
    mutable std::mutex mutex_;
    std::map<NodeSet, std::vector<NodeSet>> by_key_;
    std::ostream* log_ = nullptr;
};

struct TspGlLimits {
    double time_limit = mp::kInf;
    int max_iterations = 100000;
    DualMode dual_mode = DualMode::Fast;
};

enum class TspGlStatus { Optimal, Pruned, TimeLimit };

struct TspGlRun {
    std::optional<TspGlSolution> solution;
    TspGlStatus status = TspGlStatus::Optimal;
    double lower_bound = 0.0;
    int iterations = 0;
    int feasibility_cuts = 0;
    int optimality_cuts = 0;
    std::vector<double> master_objectives;
};

/// Builds the full solution (paths, costs) for a tour over `sub.nodes`.
TspGlSolution evaluate_tour(const SubInstance& sub, const std::vector<int>& tour);

/// Benders decomposition of the TSP-GL: master over tour edges with one eta
/// per origin, subtour feasibility cuts and aggregated optimality cuts. Stops
/// early (Pruned) once the master bound exceeds `incumbent_ub`.
TspGlRun benders_solve_tspgl(const SubInstance& sub, const BoundEstimate* warm,
                             double incumbent_ub = std::numeric_limits<double>::infinity(),
                             const TspGlLimits& limits = {}, CutPool* pool = nullptr);

/// Monolithic MIP of the TSP-GL with a subtour elimination loop; reference
/// oracle for the Benders solver.
TspGlRun solve_tspgl_direct(const SubInstance& sub, const TspGlLimits& limits = {});

}  // namespace stspgl
