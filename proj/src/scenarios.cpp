#include "stspgl/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stspgl/random.hpp"

namespace stspgl {

RoutingCostTable deterministic_routing_costs(const Instance& inst) {
    const double theta = inst.theta();
    if (!(theta > 0.0)) throw ParameterError("theta must be positive to build routing costs");
    const auto& sc = inst.scenarios();
    const int num_s = sc.num_scenarios();
    if (num_s == 0 && inst.num_requests() > 0) throw ParameterError("instance has no scenarios");
    for (int s = 0; s < num_s; ++s) {
        if (!(sc.total(s) > 0.0)) {
            throw ParameterError("scenario " + std::to_string(s) + " has zero total demand");
        }
    }
    std::vector<double> weights(static_cast<std::size_t>(inst.num_requests()), 0.0);
    for (int r = 0; r < inst.num_requests(); ++r) {
        double acc = 0.0;
        for (int s = 0; s < num_s; ++s) acc += sc.demand(s, r) / (theta * sc.total(s));
        weights[r] = acc / num_s;
    }
    return RoutingCostTable(inst.travel_matrix(), std::move(weights));
}

bool scenario_satisfied(const Instance& inst, const RequestSet& cover, int scenario, double theta) {
    double served = 0.0;
    for (int r : cover) served += inst.demand(scenario, r);
    return served >= theta * inst.scenarios().total(scenario) - kSatisfactionTolerance;
}

bool scenario_satisfied(const Instance& inst, const RequestSet& cover, int scenario) {
    return scenario_satisfied(inst, cover, scenario, inst.theta());
}

int required_scenario_count(int num_scenarios, double rho) {
    const double target = (1.0 - rho) * num_scenarios;
    // (1 - 0.05) * 20 evaluates to 19.000000000000004
    return static_cast<int>(std::ceil(target - 1e-9));
}

ChanceCheck chance_feasible(const Instance& inst, const RequestSet& cover) {
    ChanceCheck out;
    const int num_s = inst.num_scenarios();
    out.satisfied.resize(static_cast<std::size_t>(num_s));
    int count = 0;
    for (int s = 0; s < num_s; ++s) {
        const bool ok = scenario_satisfied(inst, cover, s);
        out.satisfied[s] = ok;
        count += ok ? 1 : 0;
    }
    out.feasible = count >= required_scenario_count(num_s, inst.rho());
    return out;
}

bool is_feasibility_cover(const Instance& inst, const RequestSet& cover) {
    const int num_s = inst.num_scenarios();
    const int need = required_scenario_count(num_s, inst.rho());
    int count = 0;
    for (int s = 0; s < num_s; ++s) {
        if (scenario_satisfied(inst, cover, s)) {
            if (++count >= need) return true;
        } else if (count + (num_s - s - 1) < need) {
            return false;
        }
    }
    return count >= need;
}

Instance mean_scenario(const Instance& inst) {
    const int num_s = inst.num_scenarios();
    if (num_s < 1) throw ParameterError("mean scenario needs at least one scenario");
    if (num_s == 1) return inst;
    std::vector<std::vector<double>> demand;
    demand.reserve(static_cast<std::size_t>(inst.num_requests()));
    for (int r = 0; r < inst.num_requests(); ++r) {
        double acc = 0.0;
        for (double d : inst.scenarios().request_demands(r)) acc += d;
        demand.push_back({acc / num_s});
    }
    return inst.with_demand(std::move(demand));
}

RequestSet induced_requests(const Instance& inst, const NodeSet& nodes) {
    std::vector<char> in(static_cast<std::size_t>(inst.num_nodes()), 0);
    for (int v : nodes) in[v] = 1;
    RequestSet out;
    for (int r = 0; r < inst.num_requests(); ++r) {
        const auto& req = inst.request(r);
        if (in[req.origin] && in[req.destination]) out.push_back(r);
    }
    return out;
}

MetricsRow evaluate_metrics(const Instance& inst, const TspGlSolution& sol) {
    MetricsRow row;
    row.nodes = inst.num_nodes();
    row.theta = inst.theta();
    row.rho = inst.rho();
    for (const auto& e : sol.tour_edges()) row.design_cost += inst.design_cost(e);
    const auto visited = sol.visited();
    row.nbar = inst.num_nodes() > 0 ? static_cast<double>(visited.size()) / inst.num_nodes() : 0.0;
    const auto served = induced_requests(inst, visited);
    const int num_s = inst.num_scenarios();
    int unmet = 0;
    double share = 0.0;
    for (int s = 0; s < num_s; ++s) {
        double d = 0.0;
        for (int r : served) d += inst.demand(s, r);
        const double total = inst.scenarios().total(s);
        share += total > 0.0 ? d / total : 1.0;
        if (!scenario_satisfied(inst, served, s)) ++unmet;
    }
    if (num_s > 0) {
        row.dbar = share / num_s;
        row.rhobar = static_cast<double>(unmet) / num_s;
    }
    row.infeasible = unmet > num_s - required_scenario_count(num_s, inst.rho());
    return row;
}

namespace {

bool keeps_triangle(const std::vector<Point>& pts, Point cand) {
    const auto m = pts.size();
    std::vector<double> dn(m);
    for (std::size_t i = 0; i < m; ++i) {
        dn[i] = euc2d_distance(pts[i], cand);
        if (dn[i] <= 0.0) return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const double dij = euc2d_distance(pts[i], pts[j]);
            // triangles (i, j, new) in every orientation
            if (dij > dn[i] + dn[j] + 1e-9) return false;
            if (dn[i] > dij + dn[j] + 1e-9) return false;
        }
    }
    return true;
}

void check_generator(const GeneratorOptions& opts, int n) {
    if (n < 2) throw ParameterError("generator needs at least two nodes");
    if (opts.requests < 1 || opts.scenarios < 1) throw ParameterError("requests and scenarios must be positive");
    if (opts.requests > n * (n - 1)) throw ParameterError("more requests than ordered node pairs");
    if (opts.demand_low < 1 || opts.demand_high < opts.demand_low) throw ParameterError("bad demand range");
    if (!(opts.p_present > 0.0 && opts.p_present <= 1.0)) throw ParameterError("p_present must lie in (0,1]");
    for (double v : {opts.theta, opts.rho, opts.alpha}) {
        if (v < 0.0 || v > 1.0) throw ParameterError("theta, rho and alpha must lie in [0,1]");
    }
}

Instance populate(const GeneratorOptions& opts, std::vector<Point> pts, Rng& rng) {
    const int n = static_cast<int>(pts.size());
    SquareMatrix dist = distance_matrix(pts, Rounding::Euc2d);

    const int num_c = opts.compulsory > 0 ? opts.compulsory : static_cast<int>(std::ceil(0.2 * n));
    if (num_c > n) throw ParameterError("more compulsory nodes than nodes");
    std::vector<int> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nodes[i] = i;
    rng.shuffle(nodes);
    std::vector<int> compulsory(nodes.begin(), nodes.begin() + num_c);

    std::vector<Request> pairs;
    for (int h = 0; h < n; ++h) {
        for (int k = 0; k < n; ++k) {
            if (h != k) pairs.push_back({h, k});
        }
    }
    rng.shuffle(pairs);
    pairs.resize(static_cast<std::size_t>(opts.requests));
    std::sort(pairs.begin(), pairs.end());

    const int num_s = opts.scenarios;
    std::vector<std::vector<double>> demand(pairs.size(), std::vector<double>(static_cast<std::size_t>(num_s), 0.0));
    for (auto& row : demand) {
        for (int s = 0; s < num_s; ++s) {
            if (rng.bernoulli(opts.p_present)) row[s] = rng.between(opts.demand_low, opts.demand_high);
        }
        if (std::all_of(row.begin(), row.end(), [](double d) { return d == 0.0; })) {
            row[rng.below(static_cast<std::uint64_t>(num_s))] = rng.between(opts.demand_low, opts.demand_high);
        }
    }
    for (int s = 0; s < num_s; ++s) {
        double total = 0.0;
        for (const auto& row : demand) total += row[s];
        if (total == 0.0) {
            demand[rng.below(demand.size())][s] = rng.between(opts.demand_low, opts.demand_high);
        }
    }

    return Instance(dist, SquareMatrix{}, std::move(compulsory), std::move(pairs), std::move(demand),
                    Parameters{opts.alpha, opts.theta, opts.rho}, Rounding::Euc2d, std::move(pts));
}

}  // namespace

Instance generate_instance(const GeneratorOptions& opts) {
    const int n = opts.nodes;
    check_generator(opts, n);
    Rng rng(opts.seed);
    const int grid = static_cast<int>(opts.coord_max);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int attempts = 0;
        for (;;) {
            const Point cand{static_cast<double>(rng.between(0, grid)), static_cast<double>(rng.between(0, grid))};
            if (keeps_triangle(pts, cand)) {
                pts.push_back(cand);
                break;
            }
            if (++attempts > 100000) throw ParameterError("could not place points with a metric EUC_2D rounding");
        }
    }
    return populate(opts, std::move(pts), rng);
}

Instance generate_instance(const GeneratorOptions& opts, std::vector<Point> points) {
    check_generator(opts, static_cast<int>(points.size()));
    Rng rng(opts.seed);
    return populate(opts, std::move(points), rng);
}

}  // namespace stspgl
