#include "stspgl/tspgl.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "stspgl/covers.hpp"
#include "stspgl/timer.hpp"

namespace stspgl {

namespace {

constexpr double kUnreached = std::numeric_limits<double>::infinity();

// Rotates a cycle to start at its smallest node and orients it so the second
// node is smaller than the last. Keeps results independent of solver order.
std::vector<int> canonical_cycle(std::vector<int> tour) {
    if (tour.size() < 3) {
        std::sort(tour.begin(), tour.end());
        return tour;
    }
    auto first = std::min_element(tour.begin(), tour.end());
    std::rotate(tour.begin(), first, tour.end());
    if (tour[1] > tour.back()) std::reverse(tour.begin() + 1, tour.end());
    return tour;
}

double cycle_cost(const std::vector<int>& tour, const SquareMatrix& costs) {
    TspGlSolution probe;
    probe.tour = tour;
    double total = 0.0;
    for (const auto& e : probe.tour_edges()) total += costs(e.u, e.v);
    return total;
}

std::vector<Edge> cycle_edges(const std::vector<int>& tour) {
    TspGlSolution probe;
    probe.tour = tour;
    return probe.tour_edges();
}

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<int> pred;
};

// Dijkstra over both orientations of every edge in `edges`.
ShortestPaths dijkstra(int n, const std::vector<Edge>& edges, int source, const std::function<double(int, int)>& w) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    ShortestPaths sp{std::vector<double>(static_cast<std::size_t>(n), kUnreached),
                     std::vector<int>(static_cast<std::size_t>(n), -1)};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    sp.dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, i] = heap.top();
        heap.pop();
        if (d > sp.dist[i]) continue;
        for (int j : adj[i]) {
            const double nd = d + w(i, j);
            if (nd < sp.dist[j]) {
                sp.dist[j] = nd;
                sp.pred[j] = i;
                heap.emplace(nd, j);
            }
        }
    }
    return sp;
}

std::string join(const NodeSet& nodes) {
    std::ostringstream os;
    for (std::size_t i = 0; i < nodes.size(); ++i) os << (i ? " " : "") << nodes[i];
    return os.str();
}

bool proper_subset(const NodeSet& s, const NodeSet& of) {
    return s.size() < of.size() && std::includes(of.begin(), of.end(), s.begin(), s.end());
}

// Edge variables over all pairs of `nodes`; index of pair (a, b) with a < b.
struct EdgeVars {
    std::vector<Edge> edges;
    std::map<Edge, int> var;
};

EdgeVars add_edge_vars(mp::LinearModel& model, const NodeSet& nodes, const SquareMatrix& costs, double weight) {
    EdgeVars ev;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            Edge e(nodes[a], nodes[b]);
            ev.var[e] = model.add_variable(0.0, 1.0, weight * costs(e.u, e.v), true);
            ev.edges.push_back(e);
        }
    }
    for (int i : nodes) {
        std::vector<mp::Term> terms;
        for (const auto& [e, v] : ev.var) {
            if (e.u == i || e.v == i) terms.push_back({v, 1.0});
        }
        model.add_constraint(std::move(terms), mp::Sense::Equal, 2.0);
    }
    return ev;
}

mp::Constraint subtour_cut(const EdgeVars& ev, const NodeSet& s) {
    mp::Constraint c;
    c.sense = mp::Sense::LessEqual;
    c.rhs = static_cast<double>(s.size()) - 1.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) c.terms.push_back({ev.var.at(Edge(s[a], s[b])), 1.0});
    }
    return c;
}

std::vector<Edge> selected_edges(const EdgeVars& ev, const std::vector<double>& primal) {
    std::vector<Edge> out;
    for (const auto& e : ev.edges) {
        if (primal[ev.var.at(e)] > 0.5) out.push_back(e);
    }
    return out;
}

TspTour tsp_mip(const NodeSet& nodes, const SquareMatrix& costs, double time_limit) {
    mp::LinearModel model;
    const EdgeVars ev = add_edge_vars(model, nodes, costs, 1.0);
    TspTour out;
    auto source = [&](const std::vector<double>& primal) {
        std::vector<mp::Constraint> cuts;
        for (const auto& s : find_subtours(selected_edges(ev, primal))) {
            out.subtours.push_back(s);
            cuts.push_back(subtour_cut(ev, s));
        }
        return cuts;
    };
    const auto res = mp::resolve_with_cuts(model, source, 10000, mp::SolveOptions{time_limit, 1e-9});
    if (!res.has_primal() || res.cut_incomplete)
        throw TimeLimitError("symmetric TSP did not reach a tour within its limits");
    out.tour = canonical_cycle(order_cycle(selected_edges(ev, res.primal)));
    out.value = cycle_cost(out.tour, costs);
    return out;
}

bool is_trivial(const SubInstance& sub) { return sub.size() <= 3; }

TspGlRun trivial_run(const SubInstance& sub) {
    TspGlRun run;
    run.solution = evaluate_tour(sub, sub.nodes);
    run.lower_bound = run.solution->objective;
    return run;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(b)); }

}  // namespace

SubInstance SubInstance::make(const Instance& inst, const RoutingCostTable& qtilde, RequestSet cover) {
    std::sort(cover.begin(), cover.end());
    cover.erase(std::unique(cover.begin(), cover.end()), cover.end());
    SubInstance sub;
    sub.inst = &inst;
    sub.qtilde = &qtilde;
    sub.nodes = cover_nodes(inst, cover);
    sub.cover = std::move(cover);
    return sub;
}

TspTour held_karp(const NodeSet& nodes, const SquareMatrix& costs) {
    const int m = static_cast<int>(nodes.size());
    TspTour out;
    if (m == 0) return out;
    if (m <= 2) {
        out.tour = nodes;
        out.value = m == 2 ? 2.0 * costs(nodes[0], nodes[1]) : 0.0;
        return out;
    }
    if (m > 24) throw ParameterError("Held-Karp limited to 24 nodes");
    // dp over subsets of positions 1..m-1; start and end at position 0.
    const int k = m - 1;
    const std::size_t full = std::size_t{1} << k;
    std::vector<double> dp(full * static_cast<std::size_t>(k), kUnreached);
    std::vector<int> parent(full * static_cast<std::size_t>(k), -1);
    auto at = [k](std::size_t mask, int j) { return mask * static_cast<std::size_t>(k) + static_cast<std::size_t>(j); };
    auto c = [&](int a, int b) { return costs(nodes[a], nodes[b]); };
    for (int j = 0; j < k; ++j) dp[at(std::size_t{1} << j, j)] = c(0, j + 1);
    for (std::size_t mask = 1; mask < full; ++mask) {
        for (int j = 0; j < k; ++j) {
            if (!(mask & (std::size_t{1} << j))) continue;
            const double base = dp[at(mask, j)];
            if (base == kUnreached) continue;
            for (int t = 0; t < k; ++t) {
                if (mask & (std::size_t{1} << t)) continue;
                const std::size_t next = mask | (std::size_t{1} << t);
                const double cand = base + c(j + 1, t + 1);
                if (cand < dp[at(next, t)]) {
                    dp[at(next, t)] = cand;
                    parent[at(next, t)] = j;
                }
            }
        }
    }
    double best = kUnreached;
    int last = -1;
    for (int j = 0; j < k; ++j) {
        const double cand = dp[at(full - 1, j)] + c(j + 1, 0);
        if (cand < best) {
            best = cand;
            last = j;
        }
    }
    std::vector<int> order;
    std::size_t mask = full - 1;
    for (int j = last; j >= 0;) {
        order.push_back(nodes[j + 1]);
        const int p = parent[at(mask, j)];
        mask &= ~(std::size_t{1} << j);
        j = p;
    }
    order.push_back(nodes[0]);
    std::reverse(order.begin(), order.end());
    out.tour = canonical_cycle(order);
    out.value = cycle_cost(out.tour, costs);
    return out;
}

TspTour symmetric_tsp(const NodeSet& nodes, const SquareMatrix& costs, double time_limit) {
    if (static_cast<int>(nodes.size()) <= kHeldKarpMaxNodes) return held_karp(nodes, costs);
    return tsp_mip(nodes, costs, time_limit);
}

BoundEstimate cover_bounds(const SubInstance& sub, double alpha) { return cover_bounds(sub, alpha, mp::kInf); }

BoundEstimate cover_bounds(const SubInstance& sub, double alpha, double time_limit) {
    const Instance& inst = *sub.inst;
    BoundEstimate b;
    b.tsp = symmetric_tsp(sub.nodes, inst.design_matrix(), time_limit);
    b.lb_design = b.tsp.value;
    const auto edges = cycle_edges(b.tsp.tour);
    double lb_r = 0.0;
    double ub_r = 0.0;
    for (int r : sub.cover) {
        const auto& req = inst.request(r);
        const double direct = (*sub.qtilde)(req.origin, req.destination, r);
        const auto path = primal_subproblem(edges, r, inst, *sub.qtilde);
        if (!path.feasible) throw StructuralError("cover request not on its TSP tour");
        b.lb_routing.push_back(direct);
        b.ub_routing.push_back(path.cost);
        lb_r += direct;
        ub_r += path.cost;
    }
    b.lb = (1.0 - alpha) * b.lb_design + alpha * lb_r;
    b.ub = (1.0 - alpha) * b.lb_design + alpha * ub_r;
    return b;
}

PathResult primal_subproblem(const std::vector<Edge>& xbar, int request, const Instance& inst,
                             const RoutingCostTable& qtilde) {
    const auto& req = inst.request(request);
    const auto sp = dijkstra(inst.num_nodes(), xbar, req.origin,
                             [&](int i, int j) { return qtilde(i, j, request); });
    PathResult out;
    if (sp.dist[req.destination] == kUnreached) return out;
    out.feasible = true;
    out.cost = sp.dist[req.destination];
    for (int j = req.destination; j != req.origin; j = sp.pred[j]) out.arcs.push_back({sp.pred[j], j, 1.0});
    std::reverse(out.arcs.begin(), out.arcs.end());
    return out;
}

double BendersDuals::lambda_bar(int a, int b) const {
    const auto m = nodes.size();
    return lambda[a * m + b] + lambda[b * m + a];
}

namespace {

double dual_objective(const BendersDuals& d, int h, int k, const std::vector<Edge>& xbar) {
    std::map<int, int> pos;
    for (std::size_t a = 0; a < d.nodes.size(); ++a) pos[d.nodes[a]] = static_cast<int>(a);
    double obj = d.p[pos.at(h)] - d.p[pos.at(k)];
    for (const auto& e : xbar) {
        auto iu = pos.find(e.u);
        auto iv = pos.find(e.v);
        if (iu == pos.end() || iv == pos.end()) continue;
        obj -= d.lambda_bar(iu->second, iv->second);
    }
    return obj;
}

BendersDuals lp_duals(const std::vector<Edge>& xbar, int request, const NodeSet& nodes, const Instance& inst,
                      const RoutingCostTable& qtilde) {
    const int m = static_cast<int>(nodes.size());
    const auto& req = inst.request(request);
    std::map<Edge, int> mult;
    for (const auto& e : xbar) ++mult[e];
    mp::LinearModel model;
    model.set_objective_sense(mp::ObjectiveSense::Maximize);
    std::vector<int> p(static_cast<std::size_t>(m));
    std::vector<int> lam(static_cast<std::size_t>(m * m), -1);
    for (int a = 0; a < m; ++a) {
        const int i = nodes[a];
        p[a] = model.add_variable(0.0, mp::kInf, i == req.origin ? 1.0 : (i == req.destination ? -1.0 : 0.0));
    }
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            if (a == b) continue;
            auto it = mult.find(Edge(nodes[a], nodes[b]));
            const double x = it == mult.end() ? 0.0 : it->second;
            lam[a * m + b] = model.add_variable(0.0, mp::kInf, -x);
            model.add_constraint({{p[a], 1.0}, {p[b], -1.0}, {lam[a * m + b], -1.0}}, mp::Sense::LessEqual,
                                 qtilde(nodes[a], nodes[b], request));
        }
    }
    const auto res = mp::solve_lp(model);
    BendersDuals d;
    d.request = request;
    d.nodes = nodes;
    if (res.status != mp::Status::Optimal) return d;
    d.feasible = true;
    d.p.resize(static_cast<std::size_t>(m));
    d.lambda.assign(static_cast<std::size_t>(m * m), 0.0);
    for (int a = 0; a < m; ++a) d.p[a] = res.primal[p[a]];
    for (int a = 0; a < m * m; ++a) {
        if (lam[a] >= 0) d.lambda[a] = std::max(0.0, res.primal[lam[a]]);
    }
    d.objective = res.objective;
    return d;
}

}  // namespace

BendersDuals dual_subproblem(const std::vector<Edge>& xbar, int request, const NodeSet& nodes, const Instance& inst,
                             const RoutingCostTable& qtilde, DualMode mode) {
    if (mode == DualMode::Lp) return lp_duals(xbar, request, nodes, inst, qtilde);
    const auto& req = inst.request(request);
    const auto sp = dijkstra(inst.num_nodes(), xbar, req.origin, [&](int i, int j) { return qtilde(i, j, request); });
    BendersDuals d;
    d.request = request;
    d.nodes = nodes;
    if (sp.dist[req.destination] == kUnreached) return d;
    const int m = static_cast<int>(nodes.size());
    double reach = 0.0;
    for (int i : nodes) {
        if (sp.dist[i] != kUnreached) reach = std::max(reach, sp.dist[i]);
    }
    // p = reach - distance from the origin; nodes cut off from the origin sit at 0.
    d.p.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        const double dist = sp.dist[nodes[a]];
        d.p[a] = dist == kUnreached ? 0.0 : reach - dist;
    }
    d.lambda.assign(static_cast<std::size_t>(m * m), 0.0);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            if (a == b) continue;
            d.lambda[a * m + b] = std::max(0.0, d.p[a] - d.p[b] - qtilde(nodes[a], nodes[b], request));
        }
    }
    d.feasible = true;
    d.objective = dual_objective(d, req.origin, req.destination, xbar);
    if (!close(d.objective, sp.dist[req.destination])) return lp_duals(xbar, request, nodes, inst, qtilde);
    return d;
}

std::vector<NodeSet> find_subtours(const std::vector<Edge>& edges) {
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int i) {
        auto it = parent.find(i);
        if (it == parent.end()) {
            parent[i] = i;
            return i;
        }
        if (it->second == i) return i;
        const int root = find(it->second);
        parent[i] = root;
        return root;
    };
    for (const auto& e : edges) {
        const int a = find(e.u);
        const int b = find(e.v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<int, NodeSet> groups;
    for (const auto& [node, unused] : parent) groups[find(node)].push_back(node);
    std::vector<NodeSet> out;
    if (groups.size() <= 1) return out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

double OptimalityCut::bound_at(const std::vector<Edge>& tour_edges) const {
    double value = rhs;
    for (const auto& e : tour_edges) {
        auto it = coefficients.find(e);
        if (it != coefficients.end()) value -= it->second;
    }
    return value;
}

OptimalityCut aggregated_optimality_cut(const std::vector<BendersDuals>& duals, int origin, const Instance& inst) {
    OptimalityCut cut;
    cut.origin = origin;
    for (const auto& d : duals) {
        const auto& req = inst.request(d.request);
        if (req.origin != origin) continue;
        const auto& nodes = d.nodes;
        const int m = static_cast<int>(nodes.size());
        const int h = static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), req.origin) - nodes.begin());
        const int k = static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), req.destination) - nodes.begin());
        cut.rhs += d.p[h] - d.p[k];
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                const double lb = d.lambda_bar(a, b);
                if (lb > 0.0) cut.coefficients[Edge(nodes[a], nodes[b])] += lb;
            }
        }
    }
    return cut;
}

void CutPool::add(const NodeSet& key, const std::vector<NodeSet>& subtours) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& list = by_key_[key];
    for (const auto& s : subtours) {
        if (std::find(list.begin(), list.end(), s) != list.end()) continue;
        list.push_back(s);
        if (log_) *log_ << "feasibility," << join(s) << '\n';
    }
}

std::vector<NodeSet> CutPool::subtours_for(const NodeSet& nodes) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::set<NodeSet> out;
    for (const auto& [key, list] : by_key_) {
        for (const auto& s : list) {
            if (s.size() >= 2 && proper_subset(s, nodes)) out.insert(s);
        }
    }
    return {out.begin(), out.end()};
}

std::size_t CutPool::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const auto& [key, list] : by_key_) n += list.size();
    return n;
}

void CutPool::log_line(const std::string& line) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (log_) *log_ << line << '\n';
}

TspGlSolution evaluate_tour(const SubInstance& sub, const std::vector<int>& tour) {
    const Instance& inst = *sub.inst;
    TspGlSolution sol;
    sol.tour = canonical_cycle(tour);
    const auto edges = sol.tour_edges();
    for (const auto& e : edges) sol.design_cost += inst.design_cost(e);
    for (int r : sub.cover) {
        auto path = primal_subproblem(edges, r, inst, *sub.qtilde);
        if (!path.feasible) throw StructuralError("request endpoints are not on the tour");
        sol.routing_cost += path.cost;
        sol.flows.push_back(RequestFlow{r, std::move(path.arcs)});
    }
    sol.served = sub.cover;
    const double alpha = inst.alpha();
    sol.objective = (1.0 - alpha) * sol.design_cost + alpha * sol.routing_cost;
    return sol;
}

TspGlRun benders_solve_tspgl(const SubInstance& sub, const BoundEstimate* warm, double incumbent_ub,
                             const TspGlLimits& limits, CutPool* pool) {
    if (is_trivial(sub)) return trivial_run(sub);
    const Instance& inst = *sub.inst;
    const double alpha = inst.alpha();
    const Deadline deadline(limits.time_limit);

    mp::LinearModel master;
    const EdgeVars ev = add_edge_vars(master, sub.nodes, inst.design_matrix(), 1.0 - alpha);
    std::map<int, int> eta;
    for (int r : sub.cover) {
        const int h = inst.request(r).origin;
        if (!eta.count(h)) eta[h] = master.add_variable(0.0, mp::kInf, alpha);
    }

    TspGlRun run;
    auto add_optimality_cut = [&](const OptimalityCut& cut) {
        std::vector<mp::Term> terms{{eta.at(cut.origin), 1.0}};
        for (const auto& [e, coef] : cut.coefficients) terms.push_back({ev.var.at(e), coef});
        master.add_constraint(std::move(terms), mp::Sense::GreaterEqual, cut.rhs);
        ++run.optimality_cuts;
        if (pool) {
            std::ostringstream os;
            os << "optimality," << cut.origin << ',' << cut.rhs << ',' << cut.coefficients.size();
            pool->log_line(os.str());
        }
    };
    auto add_subtours = [&](const std::vector<NodeSet>& subtours) {
        for (const auto& s : subtours) {
            if (s.size() < 2 || !proper_subset(s, sub.nodes)) continue;
            master.add_constraint(subtour_cut(ev, s));
            ++run.feasibility_cuts;
        }
    };

    // Cuts (and the incumbent) from one integral tour. Returns true when a
    // violated optimality cut was added for the given eta values.
    std::optional<TspGlSolution> best;
    auto separate = [&](const std::vector<int>& tour, const std::vector<double>* primal) {
        auto sol = evaluate_tour(sub, tour);
        const auto edges = sol.tour_edges();
        std::vector<BendersDuals> duals;
        for (int r : sub.cover) duals.push_back(dual_subproblem(edges, r, sub.nodes, inst, *sub.qtilde, limits.dual_mode));
        bool added = false;
        for (const auto& [h, var] : eta) {
            double routing = 0.0;
            for (const auto& f : sol.flows) {
                if (inst.request(f.request).origin != h) continue;
                for (const auto& a : f.arcs) routing += (*sub.qtilde)(a.from, a.to, f.request) * a.amount;
            }
            if (primal && (*primal)[var] >= routing - 1e-7 * std::max(1.0, routing)) continue;
            add_optimality_cut(aggregated_optimality_cut(duals, h, inst));
            added = true;
        }
        if (!best || sol.objective < best->objective) best = std::move(sol);
        return added;
    };

    if (pool) add_subtours(pool->subtours_for(sub.nodes));
    if (warm) {
        add_subtours(warm->tsp.subtours);
        if (warm->tsp.tour.size() == sub.nodes.size()) separate(warm->tsp.tour, nullptr);
    }

    auto backend = mp::make_backend();
    double lower = -mp::kInf;
    run.status = TspGlStatus::TimeLimit;
    for (run.iterations = 0; run.iterations < limits.max_iterations; ++run.iterations) {
        if (deadline.expired()) break;
        const auto res = backend->solve(master, mp::SolveOptions{deadline.remaining(), 1e-9}, false);
        if (res.status == mp::Status::TimeLimit) {
            if (res.best_bound) lower = std::max(lower, *res.best_bound);
            break;
        }
        if (res.status != mp::Status::Optimal) throw Error("Benders master failed: " + mp::to_string(res.status));
        run.master_objectives.push_back(res.objective);
        lower = std::max(lower, res.best_bound.value_or(res.objective));
        if (lower > incumbent_ub + 1e-9 * std::max(1.0, std::abs(incumbent_ub))) {
            run.status = TspGlStatus::Pruned;
            break;
        }
        if (best && best->objective - lower <= 1e-9 * std::max(1.0, std::abs(best->objective))) {
            run.status = TspGlStatus::Optimal;
            break;
        }
        const auto chosen = selected_edges(ev, res.primal);
        const auto subtours = find_subtours(chosen);
        if (!subtours.empty()) {
            add_subtours(subtours);
            if (pool) pool->add(sub.nodes, subtours);
            continue;
        }
        if (!separate(order_cycle(chosen), &res.primal)) {
            run.status = TspGlStatus::Optimal;
            break;
        }
    }
    run.solution = std::move(best);
    run.lower_bound = lower;
    if (run.status == TspGlStatus::Optimal && run.solution) run.lower_bound = std::min(lower, run.solution->objective);
    return run;
}

TspGlRun solve_tspgl_direct(const SubInstance& sub, const TspGlLimits& limits) {
    if (is_trivial(sub)) return trivial_run(sub);
    const Instance& inst = *sub.inst;
    const double alpha = inst.alpha();
    const auto& nodes = sub.nodes;
    const int m = static_cast<int>(nodes.size());

    mp::LinearModel model;
    const EdgeVars ev = add_edge_vars(model, nodes, inst.design_matrix(), 1.0 - alpha);
    for (int r : sub.cover) {
        const auto& req = inst.request(r);
        std::vector<int> f(static_cast<std::size_t>(m * m), -1);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                if (a == b) continue;
                f[a * m + b] = model.add_variable(0.0, mp::kInf, alpha * (*sub.qtilde)(nodes[a], nodes[b], r));
                model.add_constraint({{f[a * m + b], 1.0}, {ev.var.at(Edge(nodes[a], nodes[b])), -1.0}},
                                     mp::Sense::LessEqual, 0.0);
            }
        }
        for (int a = 0; a < m; ++a) {
            std::vector<mp::Term> terms;
            for (int b = 0; b < m; ++b) {
                if (a == b) continue;
                terms.push_back({f[a * m + b], 1.0});
                terms.push_back({f[b * m + a], -1.0});
            }
            const double rhs = nodes[a] == req.origin ? 1.0 : (nodes[a] == req.destination ? -1.0 : 0.0);
            model.add_constraint(std::move(terms), mp::Sense::Equal, rhs);
        }
    }
    TspGlRun run;
    auto source = [&](const std::vector<double>& primal) {
        std::vector<mp::Constraint> cuts;
        for (const auto& s : find_subtours(selected_edges(ev, primal))) cuts.push_back(subtour_cut(ev, s));
        run.feasibility_cuts += static_cast<int>(cuts.size());
        return cuts;
    };
    const auto res = mp::resolve_with_cuts(model, source, 10000, mp::SolveOptions{limits.time_limit, 1e-9});
    run.iterations = res.cut_rounds + 1;
    run.lower_bound = res.best_bound.value_or(-mp::kInf);
    if (res.has_primal() && !res.cut_incomplete) run.solution = evaluate_tour(sub, order_cycle(selected_edges(ev, res.primal)));
    if (res.status == mp::Status::Optimal && run.solution) {
        run.status = TspGlStatus::Optimal;
    } else if (res.status == mp::Status::TimeLimit || res.cut_incomplete) {
        run.status = TspGlStatus::TimeLimit;
    } else {
        throw Error("direct TSP-GL model failed: " + mp::to_string(res.status));
    }
    return run;
}

}  // namespace stspgl
