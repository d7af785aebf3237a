#include "stspgl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "stspgl/scenarios.hpp"

namespace stspgl {

ScenarioSet::ScenarioSet(std::vector<std::vector<double>> per_request)
    : per_request_(std::move(per_request)) {
    num_scenarios_ = per_request_.empty() ? 0 : static_cast<int>(per_request_.front().size());
    for (const auto& row : per_request_) {
        if (static_cast<int>(row.size()) != num_scenarios_) {
            throw ParameterError("every request needs one demand value per scenario");
        }
    }
    totals_.assign(static_cast<std::size_t>(num_scenarios_), 0.0);
    for (const auto& row : per_request_) {
        for (int s = 0; s < num_scenarios_; ++s) totals_[s] += row[s];
    }
}

Instance::Instance(SquareMatrix design_cost, SquareMatrix travel_time, std::vector<int> compulsory,
                   std::vector<Request> requests, std::vector<std::vector<double>> demand,
                   Parameters params, Rounding rounding, std::vector<Point> coordinates)
    : design_(std::move(design_cost)),
      params_(params),
      rounding_(rounding),
      coords_(std::move(coordinates)) {
    const int n = design_.size();
    if (travel_time.size() == 0) {
        travel_ = design_;
    } else {
        if (travel_time.size() != n) throw ParameterError("travel time matrix has wrong dimension");
        separate_travel_ = !(travel_time == design_);
        travel_ = std::move(travel_time);
    }
    if (requests.size() != demand.size()) throw ParameterError("demand rows must match requests");

    std::sort(compulsory.begin(), compulsory.end());
    compulsory.erase(std::unique(compulsory.begin(), compulsory.end()), compulsory.end());
    for (int c : compulsory) {
        if (c < 0 || c >= n) throw ParameterError("compulsory node out of range");
    }
    compulsory_ = std::move(compulsory);
    compulsory_mask_.assign(static_cast<std::size_t>(n), 0);
    for (int c : compulsory_) compulsory_mask_[c] = 1;

    std::vector<std::size_t> order(requests.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return requests[a] < requests[b]; });
    std::vector<std::vector<double>> sorted_demand;
    sorted_demand.reserve(order.size());
    for (auto idx : order) {
        const auto& r = requests[idx];
        if (r.origin < 0 || r.origin >= n || r.destination < 0 || r.destination >= n) {
            throw ParameterError("request endpoint out of range");
        }
        if (!requests_.empty() && requests_.back() == r) throw ParameterError("duplicate request");
        requests_.push_back(r);
        sorted_demand.push_back(std::move(demand[idx]));
    }
    scenarios_ = ScenarioSet(std::move(sorted_demand));
}

int Instance::find_request(int h, int k) const {
    const Request key{h, k};
    auto it = std::lower_bound(requests_.begin(), requests_.end(), key);
    if (it == requests_.end() || *it != key) return -1;
    return static_cast<int>(it - requests_.begin());
}

Instance Instance::with_parameters(Parameters params) const {
    Instance copy = *this;
    copy.params_ = params;
    return copy;
}

Instance Instance::with_demand(std::vector<std::vector<double>> demand) const {
    if (static_cast<int>(demand.size()) != num_requests()) {
        throw ParameterError("demand rows must match requests");
    }
    Instance copy = *this;
    copy.scenarios_ = ScenarioSet(std::move(demand));
    return copy;
}

double euc2d_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::floor(std::sqrt(dx * dx + dy * dy) + 0.5);
}

SquareMatrix distance_matrix(const std::vector<Point>& points, Rounding rounding) {
    const int n = static_cast<int>(points.size());
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = 0.0;
            if (rounding == Rounding::Euc2d) {
                d = euc2d_distance(points[i], points[j]);
            } else {
                d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
            }
            m(i, j) = d;
            m(j, i) = d;
        }
    }
    return m;
}

namespace {

void check_triangle(const SquareMatrix& m, const char* name, std::vector<std::string>& out) {
    constexpr double tol = 1e-9;
    const int n = m.size();
    int reported = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (m(i, j) > m(i, k) + m(k, j) + tol) {
                    if (reported < 10) {
                        std::ostringstream msg;
                        msg << "triangle inequality violated in " << name << ": c[" << i << "," << j
                            << "]=" << m(i, j) << " > c[" << i << "," << k << "]+c[" << k << "," << j
                            << "]=" << m(i, k) + m(k, j);
                        out.push_back(msg.str());
                    }
                    ++reported;
                }
            }
        }
    }
    if (reported > 10) {
        out.push_back(std::to_string(reported - 10) + " further triangle inequality violations in " + name);
    }
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport report;
    auto& v = report.violations;
    const int n = inst.num_nodes();
    if (n == 0) v.emplace_back("instance has no nodes");
    if (inst.compulsory().empty()) v.emplace_back("empty compulsory set");

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double c = inst.design_cost(i, j);
            if (!std::isfinite(c)) {
                v.push_back("missing edge [" + std::to_string(i) + "," + std::to_string(j) + "]");
            } else if (c <= 0.0) {
                v.push_back("nonpositive design cost on edge [" + std::to_string(i) + "," + std::to_string(j) + "]");
            }
            if (inst.design_cost(j, i) != c) {
                v.push_back("asymmetric design cost on edge [" + std::to_string(i) + "," + std::to_string(j) + "]");
            }
            for (double t : {inst.travel_time(i, j), inst.travel_time(j, i)}) {
                if (!std::isfinite(t) || t < 0.0) {
                    v.push_back("invalid travel time between " + std::to_string(i) + " and " + std::to_string(j));
                }
            }
        }
    }
    check_triangle(inst.design_matrix(), "design costs", v);
    if (inst.separate_travel_times()) check_triangle(inst.travel_matrix(), "travel times", v);

    for (const auto& r : inst.requests()) {
        if (r.origin == r.destination) {
            v.push_back("request with identical endpoints at node " + std::to_string(r.origin));
        }
    }
    const auto& sc = inst.scenarios();
    if (inst.num_requests() > 0 && sc.num_scenarios() == 0) v.emplace_back("no scenarios");
    for (int r = 0; r < inst.num_requests(); ++r) {
        const auto& d = sc.request_demands(r);
        if (std::any_of(d.begin(), d.end(), [](double x) { return x < 0.0 || !std::isfinite(x); })) {
            v.push_back("negative demand for request " + std::to_string(r));
        }
        if (std::none_of(d.begin(), d.end(), [](double x) { return x > 0.0; })) {
            v.push_back("request (" + std::to_string(inst.request(r).origin) + "," +
                        std::to_string(inst.request(r).destination) + ") has zero demand in every scenario");
        }
    }
    for (int s = 0; s < sc.num_scenarios(); ++s) {
        if (!(sc.total(s) > 0.0)) v.push_back("zero-demand scenario " + std::to_string(s));
    }

    const auto& p = inst.params();
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(p.alpha)) v.emplace_back("alpha outside [0,1]");
    if (!in_unit(p.theta)) v.emplace_back("theta outside [0,1]");
    if (!in_unit(p.rho)) v.emplace_back("rho outside [0,1]");
    return report;
}

std::vector<Edge> TspGlSolution::tour_edges() const {
    std::vector<Edge> edges;
    const auto m = tour.size();
    if (m < 2) return edges;
    for (std::size_t i = 0; i < m; ++i) edges.emplace_back(tour[i], tour[(i + 1) % m]);
    return edges;
}

NodeSet TspGlSolution::visited() const {
    NodeSet nodes(tour.begin(), tour.end());
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

ObjectiveSplit objective(const Instance& inst, const TspGlSolution& sol, const RoutingCostTable& qtilde) {
    ObjectiveSplit out;
    const auto edges = sol.tour_edges();
    std::set<Edge> on_tour(edges.begin(), edges.end());
    for (const auto& e : edges) out.design += inst.design_cost(e);
    for (const auto& flow : sol.flows) {
        for (const auto& a : flow.arcs) {
            if (a.amount != 0.0 && !on_tour.contains(Edge(a.from, a.to))) {
                throw StructuralError("flow on arc (" + std::to_string(a.from) + "," + std::to_string(a.to) +
                                      ") whose edge is not on the tour");
            }
            out.routing += qtilde(a.from, a.to, flow.request) * a.amount;
        }
    }
    const double alpha = inst.alpha();
    out.total = (1.0 - alpha) * out.design + alpha * out.routing;
    return out;
}

std::vector<int> order_cycle(const std::vector<Edge>& edges) {
    if (edges.empty()) return {};
    std::map<int, std::vector<int>> adj;
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (const auto& [node, nbrs] : adj) {
        if (nbrs.size() != 2) {
            throw StructuralError("node " + std::to_string(node) + " has degree " + std::to_string(nbrs.size()));
        }
    }
    if (adj.size() == 2) return {adj.begin()->first, std::next(adj.begin())->first};
    std::vector<int> order;
    const int start = adj.begin()->first;
    int prev = -1;
    int cur = start;
    do {
        order.push_back(cur);
        const auto& nb = adj[cur];
        const int next = (nb[0] != prev) ? nb[0] : nb[1];
        prev = cur;
        cur = next;
    } while (cur != start && order.size() <= adj.size());
    if (order.size() != adj.size()) throw StructuralError("edge set is not a single cycle");
    return order;
}

std::vector<std::string> check_solution(const Instance& inst, const TspGlSolution& sol) {
    std::vector<std::string> problems;
    const int n = inst.num_nodes();
    const auto nodes = sol.visited();
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
        problems.emplace_back("tour visits a node twice");
    }
    for (int v : nodes) {
        if (v < 0 || v >= n) problems.push_back("tour node out of range: " + std::to_string(v));
    }
    for (int c : inst.compulsory()) {
        if (!std::binary_search(nodes.begin(), nodes.end(), c)) {
            problems.push_back("compulsory node " + std::to_string(c) + " not on tour");
        }
    }
    const auto edges = sol.tour_edges();
    if (sol.tour.size() >= 3) {
        std::map<int, int> degree;
        for (const auto& e : edges) {
            ++degree[e.u];
            ++degree[e.v];
        }
        for (const auto& [node, d] : degree) {
            if (d != 2) problems.push_back("node " + std::to_string(node) + " has tour degree " + std::to_string(d));
        }
    }
    std::set<Edge> on_tour(edges.begin(), edges.end());
    std::set<int> served(sol.served.begin(), sol.served.end());
    std::set<int> seen_flow;
    for (const auto& flow : sol.flows) {
        if (!served.contains(flow.request)) {
            problems.push_back("flow for unserved request " + std::to_string(flow.request));
            continue;
        }
        seen_flow.insert(flow.request);
        const auto& req = inst.request(flow.request);
        std::map<int, double> balance;
        for (const auto& a : flow.arcs) {
            if (a.amount < 0.0) problems.emplace_back("negative flow");
            if (a.amount > 0.0 && !on_tour.contains(Edge(a.from, a.to))) {
                problems.push_back("flow on non-tour edge [" + std::to_string(a.from) + "," + std::to_string(a.to) + "]");
            }
            balance[a.from] += a.amount;
            balance[a.to] -= a.amount;
        }
        for (const auto& [node, b] : balance) {
            const double expect = node == req.origin ? 1.0 : (node == req.destination ? -1.0 : 0.0);
            if (std::abs(b - expect) > 1e-6) {
                problems.push_back("flow conservation broken for request " + std::to_string(flow.request) +
                                   " at node " + std::to_string(node));
            }
        }
        if (!balance.contains(req.origin)) {
            problems.push_back("request " + std::to_string(flow.request) + " carries no flow");
        }
    }
    for (int r : sol.served) {
        const auto& req = inst.request(r);
        if (!std::binary_search(nodes.begin(), nodes.end(), req.origin) ||
            !std::binary_search(nodes.begin(), nodes.end(), req.destination)) {
            problems.push_back("served request " + std::to_string(r) + " has an endpoint off the tour");
        }
        if (!seen_flow.contains(r)) problems.push_back("served request " + std::to_string(r) + " has no flow");
    }
    return problems;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::TimeLimit: return "time_limit";
    }
    return "unknown";
}

double relative_gap(double upper_bound, double lower_bound) {
    if (!std::isfinite(upper_bound) || !std::isfinite(lower_bound)) {
        return std::numeric_limits<double>::infinity();
    }
    if (upper_bound - lower_bound <= 1e-9 * std::max(1.0, std::abs(upper_bound))) return 0.0;
    if (upper_bound <= 0.0) return std::numeric_limits<double>::infinity();
    return (upper_bound - lower_bound) / upper_bound;
}

}  // namespace stspgl
