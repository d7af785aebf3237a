#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stspgl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad model parameters (theta, rho, alpha, sizes).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A solution or cover that breaks a structural rule of the model.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Dense row-major square matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n, double fill = 0.0)
        : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

    int size() const { return n_; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    double& operator()(int i, int j) { return data_[index(i, j)]; }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }
    int n_ = 0;
    std::vector<double> data_;
};

/// Origin-destination pair (h, k) with h != k.
struct Request {
    int origin = 0;
    int destination = 0;
    auto operator<=>(const Request&) const = default;
};

/// Undirected edge [i, j], always stored with i < j.
struct Edge {
    int u = 0;
    int v = 0;
    Edge() = default;
    Edge(int a, int b) : u(a < b ? a : b), v(a < b ? b : a) {}
    auto operator<=>(const Edge&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

enum class Rounding { Exact, Euc2d };

struct Parameters {
    double alpha = 0.25;
    double theta = 0.9;
    double rho = 0.1;
    bool operator==(const Parameters&) const = default;
};

/// Sorted, duplicate-free list of request indices into Instance::requests().
/// Index order coincides with lexicographic (h, k) order.
using RequestSet = std::vector<int>;

/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<int>;

/// Scenario demand table. demand(s, r) is the demand of request r in scenario s;
/// all scenarios are equally likely.
class ScenarioSet {
public:
    ScenarioSet() = default;
    /// `per_request[r][s]` is the demand of request r in scenario s.
    explicit ScenarioSet(std::vector<std::vector<double>> per_request);

    int num_scenarios() const { return num_scenarios_; }
    int num_requests() const { return static_cast<int>(per_request_.size()); }
    double demand(int scenario, int request) const { return per_request_[request][scenario]; }
    const std::vector<double>& request_demands(int request) const { return per_request_[request]; }
    double total(int scenario) const { return totals_[scenario]; }

    bool operator==(const ScenarioSet&) const = default;

private:
    int num_scenarios_ = 0;
    std::vector<std::vector<double>> per_request_;
    std::vector<double> totals_;
};

/// Problem instance: complete metric graph, compulsory stops, requests and
/// scenario demand. Immutable once built; requests are kept in canonical
/// lexicographic order and compulsory nodes sorted.
class Instance {
public:
    Instance() = default;

    /// `demand[r][s]` must be aligned with `requests[r]`; both are reordered
    /// together into canonical order. `travel_time` may be empty, in which case
    /// it equals `design_cost`.
    Instance(SquareMatrix design_cost, SquareMatrix travel_time, std::vector<int> compulsory,
             std::vector<Request> requests, std::vector<std::vector<double>> demand,
             Parameters params, Rounding rounding = Rounding::Exact,
             std::vector<Point> coordinates = {});

    int num_nodes() const { return design_.size(); }
    int num_requests() const { return static_cast<int>(requests_.size()); }
    int num_scenarios() const { return scenarios_.num_scenarios(); }

    double design_cost(int i, int j) const { return design_(i, j); }
    double design_cost(Edge e) const { return design_(e.u, e.v); }
    double travel_time(int i, int j) const { return travel_(i, j); }
    const SquareMatrix& design_matrix() const { return design_; }
    const SquareMatrix& travel_matrix() const { return travel_; }
    bool separate_travel_times() const { return separate_travel_; }

    const std::vector<int>& compulsory() const { return compulsory_; }
    bool is_compulsory(int node) const { return compulsory_mask_[node] != 0; }

    const std::vector<Request>& requests() const { return requests_; }
    const Request& request(int r) const { return requests_[r]; }
    /// Index of (h, k) in requests(), or -1.
    int find_request(int h, int k) const;

    const ScenarioSet& scenarios() const { return scenarios_; }
    double demand(int scenario, int request) const { return scenarios_.demand(scenario, request); }

    const Parameters& params() const { return params_; }
    double alpha() const { return params_.alpha; }
    double theta() const { return params_.theta; }
    double rho() const { return params_.rho; }
    Rounding rounding() const { return rounding_; }
    const std::vector<Point>& coordinates() const { return coords_; }

    /// Copy with other (alpha, theta, rho).
    Instance with_parameters(Parameters params) const;
    /// Copy with a replacement demand table (`demand[r][s]`, canonical order).
    Instance with_demand(std::vector<std::vector<double>> demand) const;

    bool operator==(const Instance&) const = default;

private:
    SquareMatrix design_;
    SquareMatrix travel_;
    bool separate_travel_ = false;
    std::vector<int> compulsory_;
    std::vector<char> compulsory_mask_;
    std::vector<Request> requests_;
    ScenarioSet scenarios_;
    Parameters params_;
    Rounding rounding_ = Rounding::Exact;
    std::vector<Point> coords_;
};

/// TSPLIB EUC_2D distance: Euclidean distance rounded to the nearest integer.
double euc2d_distance(Point a, Point b);

/// Builds a symmetric distance matrix from coordinates.
SquareMatrix distance_matrix(const std::vector<Point>& points, Rounding rounding);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Lists every broken modelling assumption. Empty report means valid.
ValidationReport validate_instance(const Instance& inst);

/// Unit flow of one request: arc (from, to) carrying `amount`.
struct ArcFlow {
    int from = 0;
    int to = 0;
    double amount = 0.0;
    bool operator==(const ArcFlow&) const = default;
};

struct RequestFlow {
    int request = 0;
    std::vector<ArcFlow> arcs;
    bool operator==(const RequestFlow&) const = default;
};

/// A tour over a node subset plus passenger flows for the served requests.
///
/// `tour` lists the visited nodes in cyclic order. Tours over one node have no
/// edges; tours over two nodes traverse their single edge twice.
struct TspGlSolution {
    std::vector<int> tour;
    std::vector<RequestFlow> flows;
    RequestSet served;
    double design_cost = 0.0;
    double routing_cost = 0.0;
    double objective = 0.0;

    /// Tour edges with multiplicity (a two-node tour yields its edge twice).
    std::vector<Edge> tour_edges() const;
    NodeSet visited() const;

    bool operator==(const TspGlSolution&) const = default;
};

class RoutingCostTable;

struct ObjectiveSplit {
    double total = 0.0;
    double design = 0.0;
    double routing = 0.0;
};

/// design = sum of tour edge costs, routing = sum of q~ f,
/// total = (1 - alpha) design + alpha routing.
/// Throws StructuralError when a flow uses an arc whose edge is not on the tour.
ObjectiveSplit objective(const Instance& inst, const TspGlSolution& sol, const RoutingCostTable& qtilde);

/// Structural checks: degree two, one connected cycle containing all
/// compulsory nodes, flow only on tour edges, unit flow per served request.
/// Returns the list of problems (empty when valid).
std::vector<std::string> check_solution(const Instance& inst, const TspGlSolution& sol);

/// Cyclic node order from an edge list in which every node has degree two.
/// Throws StructuralError if the edges do not form a single cycle.
std::vector<int> order_cycle(const std::vector<Edge>& edges);

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };

std::string to_string(SolveStatus status);

struct TraceEvent {
    double t_seconds = 0.0;
    std::string event;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    int cover_size = 0;
    int nodes_visited = 0;
};

/// Time-stamped bound events of one search run.
struct SolveTrace {
    std::vector<TraceEvent> events;
};

struct StspGlResult {
    std::optional<TspGlSolution> incumbent;
    std::optional<RequestSet> cover;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double gap = 0.0;
    SolveTrace trace;
    SolveStatus status = SolveStatus::Infeasible;
    std::string method;
};

/// (UB - LB) / UB for UB > 0; 0 when the bounds coincide; infinity otherwise.
double relative_gap(double upper_bound, double lower_bound);

}  // namespace stspgl
