#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "stspgl/covers.hpp"
#include "stspgl/model.hpp"
#include "stspgl/scenarios.hpp"

namespace fixtures {

using namespace stspgl;

/// Five collinear nodes at 0..4, c = |i - j|, compulsory {0},
/// requests (1,3) and (2,4) with scenario demand (10,0) and (0,10).
inline Instance d1() {
    SquareMatrix c(5, 0.0);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) c(i, j) = std::abs(i - j);
    return Instance(c, {}, {0}, {{1, 3}, {2, 4}}, {{10.0, 0.0}, {0.0, 10.0}}, Parameters{0.25, 0.5, 0.5});
}

/// Cheapest cycle value and order over `nodes` by enumerating permutations.
/// Routing per request takes the cheaper of the two directions around the
/// cycle. Two-node tours traverse their edge twice; one node costs nothing.
struct BruteTour {
    double objective = std::numeric_limits<double>::infinity();
    double design = 0.0;
    double routing = 0.0;
    std::vector<int> tour;
};

inline double along(const std::vector<int>& cyc, int from, int to, int r, const RoutingCostTable& q, bool forward) {
    const int m = static_cast<int>(cyc.size());
    int pos = static_cast<int>(std::find(cyc.begin(), cyc.end(), from) - cyc.begin());
    double cost = 0.0;
    while (cyc[pos] != to) {
        const int next = forward ? (pos + 1) % m : (pos + m - 1) % m;
        cost += q(cyc[pos], cyc[next], r);
        pos = next;
    }
    return cost;
}

inline BruteTour brute_tspgl(const Instance& inst, const RoutingCostTable& q, const RequestSet& cover) {
    const NodeSet nodes = cover_nodes(inst, cover);
    const double a = inst.alpha();
    BruteTour best;
    std::vector<int> rest(nodes.begin() + 1, nodes.end());
    do {
        std::vector<int> cyc{nodes[0]};
        cyc.insert(cyc.end(), rest.begin(), rest.end());
        const int m = static_cast<int>(cyc.size());
        double design = 0.0;
        if (m == 2) design = 2.0 * inst.design_cost(cyc[0], cyc[1]);
        if (m >= 3)
            for (int i = 0; i < m; ++i) design += inst.design_cost(cyc[i], cyc[(i + 1) % m]);
        double routing = 0.0;
        for (int r : cover) {
            const auto& req = inst.request(r);
            routing += std::min(along(cyc, req.origin, req.destination, r, q, true),
                                along(cyc, req.origin, req.destination, r, q, false));
        }
        const double obj = (1.0 - a) * design + a * routing;
        if (obj < best.objective) best = {obj, design, routing, cyc};
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

/// All feasibility covers that are minimal, by subset enumeration (|D| <= 20).
inline std::vector<RequestSet> enumerate_minimal_covers(const Instance& inst) {
    const int nr = inst.num_requests();
    std::vector<RequestSet> out;
    for (std::uint32_t mask = 1; mask < (1u << nr); ++mask) {
        RequestSet q;
        for (int r = 0; r < nr; ++r)
            if (mask & (1u << r)) q.push_back(r);
        if (!is_feasibility_cover(inst, q)) continue;
        bool minimal = true;
        for (std::size_t i = 0; i < q.size() && minimal; ++i) {
            RequestSet smaller = q;
            smaller.erase(smaller.begin() + static_cast<long>(i));
            if (is_feasibility_cover(inst, smaller)) minimal = false;
        }
        if (minimal) out.push_back(q);
    }
    return out;
}

/// Enumerated STSP-GL optimum: min over minimal covers of the brute-force
/// TSP-GL value. Infinity when no cover exists.
inline double enumerated_optimum(const Instance& inst) {
    const auto q = deterministic_routing_costs(inst);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cover : enumerate_minimal_covers(inst)) best = std::min(best, brute_tspgl(inst, q, cover).objective);
    return best;
}

inline bool rel_close(double a, double b, double tol = 1e-6) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace fixtures
