#include "stspgl/orchestrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "stspgl/colgen.hpp"
#include "stspgl/covers.hpp"
#include "stspgl/random.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

void SearchConfig::validate() const {
    if (!(time_limit_total > 0.0) || !(rmp_time_limit > 0.0) || !(pricing_time_limit > 0.0))
        throw ParameterError("time limits must be positive");
    if (!(gap_target >= 0.0 && gap_target < 1.0)) throw ParameterError("gap target must lie in [0, 1)");
    if (pricing_per_iteration < 1 || evals_per_iteration < 1) throw ParameterError("n and m must be positive");
    if (explore_size < 0 || explore_initial < 0 || max_iterations < 0 || stall_limit < 1)
        throw ParameterError("negative search setting");
}

bool ScoredQueue::Later::operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.ub != b.ub) return a.ub > b.ub;
    if (a.lb != b.lb) return a.lb > b.lb;
    return a.cover > b.cover;
}

void ScoredQueue::push(QueueEntry entry) { heap_.push(std::move(entry)); }

QueueEntry ScoredQueue::pop() {
    QueueEntry top = heap_.top();
    heap_.pop();
    return top;
}

std::vector<QueueEntry> ScoredQueue::peek(std::size_t k) const {
    auto copy = heap_;
    std::vector<QueueEntry> out;
    while (!copy.empty() && out.size() < k) {
        out.push_back(copy.top());
        copy.pop();
    }
    return out;
}

void SearchState::record(const std::string& event) {
    TraceEvent e;
    e.t_seconds = clock.elapsed();
    e.event = event;
    e.upper_bound = upper_bound;
    e.lower_bound = lower_bound;
    if (cover) e.cover_size = static_cast<int>(cover->size());
    if (incumbent) e.nodes_visited = static_cast<int>(incumbent->tour.size());
    trace.events.push_back(std::move(e));
}

bool SearchState::raise_lower_bound(double lb) {
    lb = std::min(lb, upper_bound);
    if (!(lb > lower_bound + 1e-12)) return false;
    lower_bound = lb;
    record("lb");
    return true;
}

bool update_incumbent(SearchState& state, const RequestSet& cover, const TspGlSolution& sol) {
    if (!(sol.objective < state.upper_bound - 1e-9)) return false;
    state.upper_bound = sol.objective;
    state.incumbent = sol;
    state.cover = cover;
    state.record("ub");
    return true;
}

namespace {

bool gap_reached(const SearchState& st, double target) {
    return st.incumbent && relative_gap(st.upper_bound, st.lower_bound) <= target + 1e-9;
}

RequestSet all_requests(const Instance& inst) {
    RequestSet d(static_cast<std::size_t>(inst.num_requests()));
    for (int r = 0; r < inst.num_requests(); ++r) d[r] = r;
    return d;
}

StspGlResult finish(SearchState& st, const std::string& method, double gap_target, bool lower_bound_valid) {
    StspGlResult res;
    res.method = method;
    res.incumbent = st.incumbent;
    res.cover = st.cover;
    res.upper_bound = st.upper_bound;
    res.lower_bound = lower_bound_valid ? st.lower_bound : -mp::kInf;
    res.gap = relative_gap(res.upper_bound, res.lower_bound);
    if (!st.incumbent) {
        res.status = SolveStatus::TimeLimit;
    } else if (lower_bound_valid && res.gap <= gap_target + 1e-9) {
        res.status = SolveStatus::Optimal;
    } else {
        res.status = SolveStatus::Feasible;
    }
    st.record("end");
    res.trace = st.trace;
    return res;
}

StspGlResult infeasible_result(SearchState& st, const std::string& method) {
    st.record("infeasible");
    StspGlResult res;
    res.method = method;
    res.status = SolveStatus::Infeasible;
    res.upper_bound = mp::kInf;
    res.lower_bound = mp::kInf;
    res.gap = relative_gap(res.upper_bound, res.lower_bound);
    res.trace = st.trace;
    return res;
}

int draw_explore_size(const Instance& inst, const SearchConfig& cfg, Rng& rng) {
    if (cfg.explore_size > 0) return std::min(cfg.explore_size, inst.num_nodes());
    const int lo = std::min(inst.num_nodes(), std::max(2, static_cast<int>(inst.compulsory().size())));
    return rng.between(lo, inst.num_nodes());
}

/// Scoring and exact evaluation shared by the three cover-based searches.
class CoverWork {
public:
    CoverWork(const Instance& inst, const RoutingCostTable& q, const SearchConfig& cfg, SearchState& st)
        : inst_(inst), q_(q), cfg_(cfg), st_(st) {
        cuts_.set_log(cfg.cut_log);
    }

    std::optional<QueueEntry> score(const RequestSet& cover) {
        if (!scored_.insert(cover).second) return std::nullopt;
        const auto sub = SubInstance::make(inst_, q_, cover);
        QueueEntry e;
        e.cover = cover;
        try {
            e.bounds = cover_bounds(sub, inst_.alpha(), st_.clock.remaining());
        } catch (const TimeLimitError&) {
            scored_.erase(cover);
            return std::nullopt;
        }
        e.lb = e.bounds.lb;
        e.ub = e.bounds.ub;
        return e;
    }

    bool prunable(const QueueEntry& e) const {
        return e.lb >= st_.upper_bound - 1e-9 * std::max(1.0, std::abs(st_.upper_bound));
    }

    /// Exact TSP-GL of the entry. True when the result is exact (optimal or
    /// pruned against the incumbent), i.e. the cover may be branched on.
    bool evaluate(const QueueEntry& e) {
        const auto sub = SubInstance::make(inst_, q_, e.cover);
        TspGlLimits limits;
        limits.time_limit = st_.clock.remaining();
        limits.dual_mode = cfg_.dual_mode;
        const auto run = benders_solve_tspgl(sub, &e.bounds, st_.upper_bound, limits, &cuts_);
        if (run.solution) update_incumbent(st_, e.cover, *run.solution);
        ++evaluations_;
        return run.status != TspGlStatus::TimeLimit;
    }

    int evaluations() const { return evaluations_; }

private:
    const Instance& inst_;
    const RoutingCostTable& q_;
    const SearchConfig& cfg_;
    SearchState& st_;
    CutPool cuts_;
    std::set<RequestSet> scored_;
    int evaluations_ = 0;
};

StspGlResult branch_and_price(const Instance& inst, const SearchConfig& cfg, bool hybrid, const std::string& method) {
    cfg.validate();
    SearchState st(cfg.time_limit_total);
    st.record("start");
    const RequestSet everything = all_requests(inst);
    if (!is_feasibility_cover(inst, everything)) return infeasible_result(st, method);
    const auto q = deterministic_routing_costs(inst);

    ColumnPool pool;
    pool.add(inst, everything);
    RestrictedMaster rmp(inst, q);
    CoverWork work(inst, q, cfg, st);
    ScoredQueue queue;
    SeenRegistry seen;
    Rng rng(cfg.seed);
    const int n_rounds = cfg.original_bp ? 1 << 30 : cfg.pricing_per_iteration;
    const int m_evals = cfg.original_bp ? 1 : cfg.evals_per_iteration;

    // Scores a cover and either queues it or, when its lower bound already
    // reaches the incumbent, branches it away.
    auto consider = [&](const RequestSet& cover) {
        if (pool.is_branched(cover)) return false;
        auto e = work.score(cover);
        if (!e) return false;
        if (!cfg.original_bp && work.prunable(*e)) {
            add_branching_cut(pool, cover);
            return true;
        }
        queue.push(std::move(*e));
        return true;
    };
    auto add_found = [&](const std::optional<RequestSet>& cover) {
        if (!cover) return;
        pool.add(inst, *cover);
        consider(*cover);
    };

    if (hybrid) {
        for (int k = 0; k < cfg.explore_initial && !st.clock.expired(); ++k) {
            const int size = draw_explore_size(inst, cfg, rng);
            add_found(explore(inst, size, rng.fork(), seen));
        }
    }

    PricingOptions popts;
    popts.gap = cfg.gap_target;
    popts.minimality_cuts = cfg.minimality_cuts;
    int iter = 0;
    int cg_round = 0;
    if (cfg.cg_log) *cfg.cg_log << iteration_log_header() << '\n';

    while (!st.clock.expired() && !gap_reached(st, cfg.gap_target)) {
        if (cfg.max_iterations > 0 && iter >= cfg.max_iterations) break;
        ++iter;

        // Phase 1: column generation rounds.
        std::optional<RmpSolution> last;
        bool exhausted = false;
        for (int round = 0; round < n_rounds && !st.clock.expired(); ++round) {
            rmp.sync(pool);
            auto sol = rmp.solve(st.clock.limit(cfg.rmp_time_limit));
            if (sol.status != mp::Status::Optimal) break;
            popts.time_limit = st.clock.limit(cfg.pricing_time_limit);
            const auto pr = solve_pricing(inst, sol.duals, pool, popts);
            const double lb = lagrangian_lower_bound(sol.objective, pr.bound);
            if (lb > -mp::kInf) st.raise_lower_bound(lb);
            if (cfg.cg_log)
                *cfg.cg_log << iteration_log_line(++cg_round, sol.objective, pr.objective, st.lower_bound, pool.size(),
                                                  static_cast<int>(pool.branched().size()))
                            << '\n';
            last = std::move(sol);
            if (!pr.cover) {
                exhausted = !pr.timed_out;
                break;
            }
            pool.add(inst, *pr.cover);
            if (hybrid) {
                add_found(local_search(inst, *pr.cover, rng.fork()));
                const int size = static_cast<int>(cover_nodes(inst, *pr.cover).size());
                add_found(explore(inst, size, rng.fork(), seen));
            }
            if (gap_reached(st, cfg.gap_target)) break;
        }
        if (gap_reached(st, cfg.gap_target) || st.clock.expired()) break;

        // Phase 2: score the covers carrying weight in the RMP optimum.
        bool changed = false;
        if (last) {
            for (std::size_t c = 0; c < last->chi.size(); ++c) {
                if (last->chi[c] > 1e-6) changed |= consider(pool.columns()[c].requests);
            }
        }
        if (!st.incumbent && queue.empty() && !pool.is_branched(everything)) changed |= consider(everything);

        // Phase 3: exact evaluation of the best queued covers.
        for (int k = 0; k < m_evals && !queue.empty() && !st.clock.expired(); ++k) {
            const auto e = queue.pop();
            changed = true;
            if (!cfg.original_bp && work.prunable(e)) {
                add_branching_cut(pool, e.cover);
                continue;
            }
            if (work.evaluate(e)) add_branching_cut(pool, e.cover);
        }
        if (exhausted && !changed) break;
    }
    return finish(st, method, cfg.gap_target, true);
}

}  // namespace

StspGlResult run_bp(const Instance& inst, const SearchConfig& cfg) { return branch_and_price(inst, cfg, false, "bp"); }

StspGlResult run_hybrid(const Instance& inst, const SearchConfig& cfg) {
    return branch_and_price(inst, cfg, true, "hybrid");
}

StspGlResult run_heuristic(const Instance& inst, const SearchConfig& cfg) {
    cfg.validate();
    const std::string method = "heuristic";
    SearchState st(cfg.time_limit_total);
    st.record("start");
    const RequestSet everything = all_requests(inst);
    if (!is_feasibility_cover(inst, everything)) return infeasible_result(st, method);
    const auto q = deterministic_routing_costs(inst);
    CoverWork work(inst, q, cfg, st);
    ScoredQueue queue;
    SeenRegistry seen;
    Rng rng(cfg.seed);
    auto add = [&](const std::optional<RequestSet>& cover) {
        if (!cover) return false;
        auto e = work.score(*cover);
        if (!e) return false;
        queue.push(std::move(*e));
        return true;
    };

    add(minimal_feasibility_cover(inst, everything));
    int stall = 0;
    for (int iter = 0; !st.clock.expired() && stall < cfg.stall_limit; ++iter) {
        if (cfg.max_iterations > 0 && iter >= cfg.max_iterations) break;
        bool progress = add(explore(inst, draw_explore_size(inst, cfg, rng), rng.fork(), seen));

        std::vector<RequestSet> bases;
        for (const auto& e : queue.peek(2)) bases.push_back(e.cover);
        if (bases.empty() && st.cover) bases.push_back(*st.cover);
        for (const auto& base : bases) progress |= add(local_search(inst, base, rng.fork()));

        while (!queue.empty() && !st.clock.expired()) {
            const auto e = queue.pop();
            if (work.prunable(e)) continue;
            work.evaluate(e);
            progress = true;
            break;
        }
        stall = progress ? 0 : stall + 1;
    }
    return finish(st, method, cfg.gap_target, false);
}

StspGlResult run_mip_benchmark(const Instance& inst, const SearchConfig& cfg) {
    cfg.validate();
    const std::string method = "mip";
    SearchState st(cfg.time_limit_total);
    st.record("start");
    if (!is_feasibility_cover(inst, all_requests(inst))) return infeasible_result(st, method);
    const auto q = deterministic_routing_costs(inst);
    const int n = inst.num_nodes();
    const int nr = inst.num_requests();
    const int ns = inst.num_scenarios();
    const double alpha = inst.alpha();
    const auto& comp = inst.compulsory();

    mp::LinearModel model;
    std::vector<int> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[i] = model.add_variable(inst.is_compulsory(i) ? 1.0 : 0.0, 1.0, 0.0, true);
    std::vector<std::vector<int>> x(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool doubled = std::all_of(comp.begin(), comp.end(), [&](int c) { return c == i || c == j; });
            x[i][j] = x[j][i] =
                model.add_variable(0.0, doubled ? 2.0 : 1.0, (1.0 - alpha) * inst.design_cost(i, j), true);
            edges.emplace_back(i, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        std::vector<mp::Term> terms{{w[i], -2.0}};
        for (int j = 0; j < n; ++j)
            if (j != i) terms.push_back({x[i][j], 1.0});
        model.add_constraint(std::move(terms), mp::Sense::Equal, 0.0);
    }
    std::vector<int> z(static_cast<std::size_t>(nr));
    for (int r = 0; r < nr; ++r) {
        const auto& req = inst.request(r);
        z[r] = model.add_variable(0.0, 1.0, 0.0, true);
        model.add_constraint({{z[r], 1.0}, {w[req.origin], -1.0}}, mp::Sense::LessEqual, 0.0);
        model.add_constraint({{z[r], 1.0}, {w[req.destination], -1.0}}, mp::Sense::LessEqual, 0.0);
        std::vector<std::vector<mp::Term>> balance(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const int f = model.add_variable(0.0, mp::kInf, alpha * q(i, j, r));
                model.add_constraint({{f, 1.0}, {x[i][j], -1.0}}, mp::Sense::LessEqual, 0.0);
                balance[i].push_back({f, 1.0});
                balance[j].push_back({f, -1.0});
            }
        }
        balance[req.origin].push_back({z[r], -1.0});
        balance[req.destination].push_back({z[r], 1.0});
        for (int i = 0; i < n; ++i) model.add_constraint(std::move(balance[i]), mp::Sense::Equal, 0.0);
    }
    std::vector<mp::Term> gamma_sum;
    for (int s = 0; s < ns; ++s) {
        const int g = model.add_variable(0.0, 1.0, 0.0, true);
        std::vector<mp::Term> terms{{g, -inst.theta() * inst.scenarios().total(s)}};
        for (int r = 0; r < nr; ++r) terms.push_back({z[r], inst.demand(s, r)});
        model.add_constraint(std::move(terms), mp::Sense::GreaterEqual, -kSatisfactionTolerance);
        gamma_sum.push_back({g, 1.0});
    }
    model.add_constraint(std::move(gamma_sum), mp::Sense::GreaterEqual,
                         static_cast<double>(required_scenario_count(ns, inst.rho())));

    auto chosen_edges = [&](const std::vector<double>& primal) {
        std::vector<Edge> out;
        for (const auto& e : edges) {
            const double v = primal[x[e.u][e.v]];
            if (v > 0.5) out.push_back(e);
            if (v > 1.5) out.push_back(e);
        }
        return out;
    };
    // Optional nodes make plain subtour cuts invalid; connectivity cuts
    // x(delta(S)) >= 2 (w_i + w_j - 1) tie each component to the rest.
    mp::CutSource source = [&](const std::vector<double>& primal) {
        std::vector<mp::Constraint> cuts;
        const auto comps = find_subtours(chosen_edges(primal));
        for (const auto& s : comps) {
            std::vector<char> in(static_cast<std::size_t>(n), 0);
            for (int i : s) in[i] = 1;
            std::vector<mp::Term> cut;
            for (const auto& e : edges)
                if (in[e.u] != in[e.v]) cut.push_back({x[e.u][e.v], 1.0});
            const int i = s.front();
            int j = -1;
            for (const auto& other : comps) {
                if (other != s) {
                    j = other.front();
                    break;
                }
            }
            auto c = cut;
            c.push_back({w[i], -2.0});
            c.push_back({w[j], -2.0});
            cuts.push_back(mp::Constraint{std::move(c), mp::Sense::GreaterEqual, -2.0, "connect"});
        }
        return cuts;
    };

    const auto res = mp::resolve_with_cuts(model, source, 100000,
                                           mp::SolveOptions{st.clock.remaining(), cfg.gap_target});
    if (res.status == mp::Status::Infeasible) return infeasible_result(st, method);
    if (res.has_primal() && !res.cut_incomplete) {
        const auto tour_edges = chosen_edges(res.primal);
        std::vector<int> tour;
        if (tour_edges.size() == 2 && tour_edges[0] == tour_edges[1]) {
            tour = {tour_edges[0].u, tour_edges[0].v};
        } else {
            tour = order_cycle(tour_edges);
        }
        RequestSet served;
        for (int r = 0; r < nr; ++r)
            if (res.primal[z[r]] > 0.5) served.push_back(r);
        const auto sub = SubInstance::make(inst, q, served);
        update_incumbent(st, served, evaluate_tour(sub, tour));
    }
    if (res.best_bound) st.raise_lower_bound(*res.best_bound);
    return finish(st, method, cfg.gap_target, true);
}

StspGlResult run_method(const Instance& inst, const std::string& method, const SearchConfig& cfg) {
    if (method == "mip") return run_mip_benchmark(inst, cfg);
    if (method == "bp") return run_bp(inst, cfg);
    if (method == "heuristic") return run_heuristic(inst, cfg);
    if (method == "hybrid") return run_hybrid(inst, cfg);
    if (method == "deterministic") {
        auto res = run_bp(mean_scenario(inst), cfg);
        res.method = "deterministic";
        return res;
    }
    throw ParameterError("unknown method '" + method + "'");
}

}  // namespace stspgl
