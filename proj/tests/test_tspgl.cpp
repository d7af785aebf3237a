#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "stspgl/random.hpp"
#include "stspgl/tspgl.hpp"

using namespace stspgl;
using fixtures::rel_close;

namespace {

SquareMatrix unit_k(int n) {
    SquareMatrix c(n, 1.0);
    for (int i = 0; i < n; ++i) c(i, i) = 0.0;
    return c;
}

// Random cover of a generated instance with |N'| <= max_nodes.
struct RandomSub {
    Instance inst;
    RoutingCostTable q;
    RequestSet cover;
};

RandomSub random_sub(std::uint64_t seed, int max_nodes) {
    GeneratorOptions g;
    g.nodes = 10;
    g.requests = 12;
    g.scenarios = 3;
    g.seed = seed;
    Rng rng(seed * 7919 + 1);
    g.alpha = 0.1 + 0.8 * rng.unit();
    RandomSub rs{generate_instance(g), {}, {}};
    rs.q = deterministic_routing_costs(rs.inst);
    std::vector<int> order(static_cast<std::size_t>(rs.inst.num_requests()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    const int want = rng.between(1, 5);
    for (int r : order) {
        RequestSet trial = rs.cover;
        trial.push_back(r);
        std::sort(trial.begin(), trial.end());
        if (static_cast<int>(cover_nodes(rs.inst, trial).size()) > max_nodes) continue;
        rs.cover = trial;
        if (static_cast<int>(rs.cover.size()) == want) break;
    }
    return rs;
}

}  // namespace

TEST(SymmetricTsp, Triangle) {
    SquareMatrix c(3, 0.0);
    c(0, 1) = c(1, 0) = 3;
    c(1, 2) = c(2, 1) = 4;
    c(0, 2) = c(2, 0) = 5;
    const auto t = symmetric_tsp({0, 1, 2}, c);
    EXPECT_DOUBLE_EQ(t.value, 12.0);
    EXPECT_EQ(t.tour.size(), 3u);
}

TEST(SymmetricTsp, UnitK4) { EXPECT_DOUBLE_EQ(symmetric_tsp({0, 1, 2, 3}, unit_k(4)).value, 4.0); }

TEST(SymmetricTsp, DegenerateSizes) {
    const auto inst = fixtures::d1();
    EXPECT_DOUBLE_EQ(symmetric_tsp({2}, inst.design_matrix()).value, 0.0);
    EXPECT_DOUBLE_EQ(symmetric_tsp({1, 4}, inst.design_matrix()).value, 6.0);
}

TEST(SymmetricTsp, D1AllNodes) { EXPECT_DOUBLE_EQ(symmetric_tsp({0, 1, 2, 3, 4}, fixtures::d1().design_matrix()).value, 8.0); }

TEST(SymmetricTsp, HeldKarpMatchesMip) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GeneratorOptions g;
        g.nodes = 17;
        g.seed = seed;
        const auto inst = generate_instance(g);
        NodeSet all(17);
        for (int i = 0; i < 17; ++i) all[i] = i;
        const auto mip = symmetric_tsp(all, inst.design_matrix());
        NodeSet first(all.begin(), all.begin() + 12);
        const auto hk = held_karp(first, inst.design_matrix());
        const auto hk_full = held_karp(all, inst.design_matrix());
        EXPECT_NEAR(mip.value, hk_full.value, 1e-9) << "seed " << seed;
        EXPECT_LE(hk.value, mip.value + 1e-9);
    }
}

TEST(CoverBounds, D1SingleRequest) {
    const auto inst = fixtures::d1();
    const auto q = deterministic_routing_costs(inst);
    const auto sub = SubInstance::make(inst, q, {0});
    const auto b = cover_bounds(sub, inst.alpha());
    EXPECT_DOUBLE_EQ(b.lb_design, 6.0);
    EXPECT_DOUBLE_EQ(b.lb_routing[0], 2.0);
    EXPECT_DOUBLE_EQ(b.ub_routing[0], 2.0);
    EXPECT_DOUBLE_EQ(b.lb, 5.0);
    EXPECT_DOUBLE_EQ(b.ub, 5.0);
}

TEST(CoverBounds, SandwichRandom) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto rs = random_sub(seed, 7);
        const auto sub = SubInstance::make(rs.inst, rs.q, rs.cover);
        const auto b = cover_bounds(sub, rs.inst.alpha());
        const double exact = fixtures::brute_tspgl(rs.inst, rs.q, rs.cover).objective;
        EXPECT_LE(b.lb, exact + 1e-9) << "seed " << seed;
        EXPECT_GE(b.ub, exact - 1e-9) << "seed " << seed;
    }
}

TEST(PrimalSubproblem, D1Triangle) {
    const auto inst = fixtures::d1();
    const auto q = deterministic_routing_costs(inst);
    const std::vector<Edge> tour{{0, 1}, {1, 3}, {0, 3}};
    const auto p = primal_subproblem(tour, 0, inst, q);
    ASSERT_TRUE(p.feasible);
    EXPECT_DOUBLE_EQ(p.cost, 2.0);
    ASSERT_EQ(p.arcs.size(), 1u);
    EXPECT_EQ(p.arcs[0].from, 1);
    EXPECT_EQ(p.arcs[0].to, 3);
    EXPECT_FALSE(primal_subproblem(tour, 1, inst, q).feasible);
}

TEST(DualSubproblem, StrongDualityBothModes) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto rs = random_sub(seed, 7);
        const auto sub = SubInstance::make(rs.inst, rs.q, rs.cover);
        if (sub.size() < 3) continue;
        std::vector<int> tour = sub.nodes;
        Rng rng(seed);
        rng.shuffle(tour);
        TspGlSolution probe;
        probe.tour = tour;
        const auto edges = probe.tour_edges();
        for (int r : rs.cover) {
            const auto z = primal_subproblem(edges, r, rs.inst, rs.q);
            ASSERT_TRUE(z.feasible);
            const auto fast = dual_subproblem(edges, r, sub.nodes, rs.inst, rs.q, DualMode::Fast);
            const auto lp = dual_subproblem(edges, r, sub.nodes, rs.inst, rs.q, DualMode::Lp);
            EXPECT_TRUE(rel_close(fast.objective, z.cost, 1e-7));
            EXPECT_TRUE(rel_close(lp.objective, z.cost, 1e-7));
            // Dual feasibility of the constructed point.
            const int m = static_cast<int>(sub.nodes.size());
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (a != b) {
                        EXPECT_LE(fast.p[a] - fast.p[b] - fast.lambda[a * m + b],
                                  rs.q(sub.nodes[a], sub.nodes[b], r) + 1e-9);
                        EXPECT_GE(fast.p[a], 0.0);
                    }
        }
    }
}

TEST(DualSubproblem, ZeroCostsGiveZero) {
    const auto inst = fixtures::d1();
    const RoutingCostTable zero(inst.travel_matrix(), {0.0, 0.0});
    const std::vector<Edge> tour{{0, 1}, {1, 3}, {0, 3}};
    const auto d = dual_subproblem(tour, 0, {0, 1, 3}, inst, zero, DualMode::Lp);
    EXPECT_NEAR(d.objective, 0.0, 1e-12);
}

TEST(FindSubtours, CycleAndTwoTriangles) {
    EXPECT_TRUE(find_subtours({{0, 1}, {1, 2}, {0, 2}}).empty());
    const auto s = find_subtours({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0], (NodeSet{0, 1, 2}));
    EXPECT_EQ(s[1], (NodeSet{3, 4, 5}));
}

TEST(OptimalityCut, TightAtGeneratingTourAndValidEverywhere) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto rs = random_sub(seed, 6);
        const auto sub = SubInstance::make(rs.inst, rs.q, rs.cover);
        if (sub.size() < 3) continue;
        const auto sol = evaluate_tour(sub, sub.nodes);
        const auto edges = sol.tour_edges();
        std::vector<BendersDuals> duals;
        for (int r : rs.cover) duals.push_back(dual_subproblem(edges, r, sub.nodes, rs.inst, rs.q));
        std::set<int> origins;
        for (int r : rs.cover) origins.insert(rs.inst.request(r).origin);
        for (int h : origins) {
            const auto cut = aggregated_optimality_cut(duals, h, rs.inst);
            double eta = 0.0;
            for (const auto& f : sol.flows)
                if (rs.inst.request(f.request).origin == h)
                    for (const auto& a : f.arcs) eta += rs.q(a.from, a.to, f.request);
            EXPECT_TRUE(rel_close(cut.bound_at(edges), eta, 1e-7));
            // Every other tour: the cut never exceeds the true contribution.
            std::vector<int> rest(sub.nodes.begin() + 1, sub.nodes.end());
            do {
                std::vector<int> tour{sub.nodes[0]};
                tour.insert(tour.end(), rest.begin(), rest.end());
                const auto other = evaluate_tour(sub, tour);
                double true_eta = 0.0;
                for (const auto& f : other.flows)
                    if (rs.inst.request(f.request).origin == h)
                        for (const auto& a : f.arcs) true_eta += rs.q(a.from, a.to, f.request);
                EXPECT_LE(cut.bound_at(other.tour_edges()), true_eta + 1e-7);
            } while (std::next_permutation(rest.begin(), rest.end()));
        }
    }
}

TEST(Benders, D1Covers) {
    const auto inst = fixtures::d1();
    const auto q = deterministic_routing_costs(inst);
    const auto a = benders_solve_tspgl(SubInstance::make(inst, q, {0}), nullptr);
    ASSERT_TRUE(a.solution);
    EXPECT_NEAR(a.solution->objective, 5.0, 1e-9);
    EXPECT_EQ(a.solution->visited(), (NodeSet{0, 1, 3}));
    const auto b = benders_solve_tspgl(SubInstance::make(inst, q, {1}), nullptr);
    EXPECT_NEAR(b.solution->objective, 6.5, 1e-9);
}

TEST(Benders, MatchesDirectAndBrute) {
    CutPool pool;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto rs = random_sub(seed, 8);
        const auto sub = SubInstance::make(rs.inst, rs.q, rs.cover);
        const auto warm = cover_bounds(sub, rs.inst.alpha());
        const auto benders = benders_solve_tspgl(sub, seed % 2 ? &warm : nullptr, mp::kInf, {}, &pool);
        const auto direct = solve_tspgl_direct(sub);
        ASSERT_TRUE(benders.solution && direct.solution);
        EXPECT_EQ(benders.status, TspGlStatus::Optimal);
        EXPECT_TRUE(rel_close(benders.solution->objective, direct.solution->objective)) << "seed " << seed;
        if (sub.size() <= 7)
            EXPECT_TRUE(rel_close(benders.solution->objective, fixtures::brute_tspgl(rs.inst, rs.q, rs.cover).objective));
        EXPECT_TRUE(check_solution(rs.inst, *benders.solution).empty());
        for (std::size_t i = 1; i < benders.master_objectives.size(); ++i)
            EXPECT_GE(benders.master_objectives[i], benders.master_objectives[i - 1] - 1e-7);
    }
}

TEST(Benders, EarlyAbortAboveIncumbent) {
    const auto rs = random_sub(3, 8);
    const auto sub = SubInstance::make(rs.inst, rs.q, rs.cover);
    if (sub.size() < 4) GTEST_SKIP();
    const auto run = benders_solve_tspgl(sub, nullptr, 1e-3);
    EXPECT_EQ(run.status, TspGlStatus::Pruned);
}

TEST(Direct, AlphaExtremes) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto rs = random_sub(seed, 7);
        auto p = rs.inst.params();
        p.alpha = 0.0;
        const auto inst0 = rs.inst.with_parameters(p);
        const auto q0 = deterministic_routing_costs(inst0);
        const auto sub0 = SubInstance::make(inst0, q0, rs.cover);
        EXPECT_TRUE(rel_close(solve_tspgl_direct(sub0).solution->objective,
                              symmetric_tsp(sub0.nodes, inst0.design_matrix()).value));
        p.alpha = 1.0;
        const auto inst1 = rs.inst.with_parameters(p);
        const auto q1 = deterministic_routing_costs(inst1);
        const auto sub1 = SubInstance::make(inst1, q1, rs.cover);
        EXPECT_TRUE(rel_close(solve_tspgl_direct(sub1).solution->objective,
                              fixtures::brute_tspgl(inst1, q1, rs.cover).objective));
    }
}

TEST(CutPoolTest, ReusesProperSubsets) {
    CutPool pool;
    std::ostringstream log;
    pool.set_log(&log);
    pool.add({0, 1, 2, 3, 4, 5}, {{0, 1, 2}, {3, 4, 5}});
    pool.add({0, 1, 2, 3, 4, 5}, {{0, 1, 2}});
    EXPECT_EQ(pool.size(), 2u);
    EXPECT_EQ(pool.subtours_for({0, 1, 2, 3}).size(), 1u);
    EXPECT_TRUE(pool.subtours_for({0, 1, 2}).empty());
    EXPECT_NE(log.str().find("feasibility,0 1 2"), std::string::npos);
}
