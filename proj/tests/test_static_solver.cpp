#include <catch2/catch_amalgamated.hpp>

#include "barter/instances.hpp"
#include "barter/static_solver.hpp"
#include "oracles.hpp"

using namespace barter;

TEST_CASE("static optimum of the 3-agent example is one 3-cycle") {
    Execution ex = solve_static_optimal(gen_fig1());
    CHECK(ex.size == 3);
    REQUIRE(ex.cycles.size() == 1);
    CHECK(ex.cycles[0].size() == 3);
}

TEST_CASE("edge graph structure") {
    TradingGraph g = initial_graph(gen_fig1());
    EdgeGraph eg = build_edge_graph(g);
    CHECK(eg.edges.size() == 7);
    // every node has its weight-0 self pair
    for (int i = 0; i < 7; ++i) {
        const Weight* w = eg.bip.weight(i, i);
        REQUIRE(w != nullptr);
        CHECK(*w == 0);
    }
    // consecutive pairs weigh 1
    int ones = 0;
    for (int i = 0; i < 7; ++i)
        for (const auto& [j, w] : eg.bip.edges(i))
            if (w == 1) ++ones;
    CHECK(ones > 0);
}

TEST_CASE("matching weight is twice the execution size") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Instance inst = gen_random(4, 5, 0.5, seed);
        TradingGraph g = initial_graph(inst);
        EdgeGraph eg = build_edge_graph(g);
        Matching m = max_weight_perfect_matching(eg.bip);
        Execution ex = matching_to_execution(g, eg, m);
        CHECK(Weight(2 * ex.size) == m.weight);
    }
}

TEST_CASE("static solver matches the brute-force cycle-packing oracle") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        Instance inst = gen_random(4, 4, 0.6, seed);
        CHECK(solve_static_optimal(inst).size == oracles::static_optimum(inst));
    }
}

TEST_CASE("execution and matching round-trip") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Instance inst = gen_random(4, 5, 0.5, seed);
        TradingGraph g = initial_graph(inst);
        EdgeGraph eg = build_edge_graph(g);
        Matching m = max_weight_perfect_matching(eg.bip);
        Execution ex = matching_to_execution(g, eg, m);
        Matching back = execution_to_matching(g, eg, ex);
        CHECK(back.weight == m.weight);
        CHECK(matching_to_execution(g, eg, back).size == ex.size);
    }
}

TEST_CASE("perturbed weights recover the unperturbed optimum by flooring") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Instance inst = gen_random(4, 4, 0.5, seed);
        TradingGraph g = initial_graph(inst);
        PerturbationOrder order(g.n, g.m);

        EdgeGraph plain = build_edge_graph(g);
        Matching mp = max_weight_perfect_matching(plain.bip);
        EdgeGraph pert = build_perturbed_edge_graph(g, order);
        Matching mq = max_weight_perfect_matching(pert.bip);

        // floor(w' / 2^P) = unperturbed weight of the same matching, and the
        // perturbed optimum is still optimal for the unperturbed weights
        CHECK(mq.weight >> order.scale_exponent() == mp.weight);
    }
}

TEST_CASE("perturbation order validation") {
    CHECK_THROWS_AS(PerturbationOrder(2, 2, {1, 2, 3}), BadParams);
    CHECK_THROWS_AS(PerturbationOrder(2, 2, {1, 2, 2, 4}), BadParams);
    CHECK_THROWS_AS(PerturbationOrder(2, 2, {0, 1, 2, 3}), BadParams);
    PerturbationOrder ok(2, 2, {4, 3, 2, 1});
    CHECK(ok.pi(0, 0) == 4);
    CHECK(ok.pi(1, 1) == 1);
}

TEST_CASE("tie-broken mechanism gives every optimal matching the same utilities") {
    Instance inst = gen_fig1();
    TradingGraph g = initial_graph(inst);
    EdgeGraph eg = build_perturbed_edge_graph(g, PerturbationOrder(g.n, g.m));
    auto all = enumerate_perfect_matchings(eg.bip, 100'000);
    Weight best{-1};
    for (const auto& m : all) best = std::max(best, m.weight);
    std::vector<std::vector<int>> reference;
    for (const auto& m : all) {
        if (m.weight != best) continue;
        auto received = matching_to_execution(g, eg, m).received;
        for (auto& v : received) std::sort(v.begin(), v.end());
        if (reference.empty())
            reference = received;
        else
            CHECK(received == reference);
    }
    REQUIRE_FALSE(reference.empty());
}

TEST_CASE("reports induce relaxed instances with validation") {
    Instance universe = gen_fig1();
    std::vector<Report> truthful;
    for (int a = 0; a < universe.num_agents(); ++a)
        truthful.push_back({universe.demand[a], universe.supply[a]});

    SECTION("truthful reports reproduce the instance behavior") {
        CHECK(solve_As(universe, truthful).size == solve_As(universe).size);
    }
    SECTION("an item claimed twice is rejected") {
        auto reports = truthful;
        reports[0].supply = {universe.item_index("x")};  // b also claims x
        CHECK_THROWS_AS(report_instance(universe, reports), InvalidReports);
    }
    SECTION("a hidden item simply disappears") {
        auto reports = truthful;
        reports[2].supply.clear();  // c hides y
        Instance reported = report_instance(universe, reports);
        CHECK(reported.relaxed);
        CHECK(solve_As(reported).size == 0);
    }
    SECTION("demanding a claimed item is rejected") {
        auto reports = truthful;
        reports[0].demand.push_back(universe.item_index("z"));  // a owns z
        CHECK_THROWS_AS(report_instance(universe, reports), InvalidReports);
    }
}
