#include <catch2/catch_amalgamated.hpp>

#include "barter/dynamic.hpp"
#include "barter/instances.hpp"

using namespace barter;

TEST_CASE("cycle enumeration on the 3-agent example") {
    Instance inst = gen_fig1();
    TradingGraph g = initial_graph(inst);
    auto cycles = enumerate_simple_cycles(g);
    // (a,x,b,y,c,z,a) and (b,y,c,x,b)
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0].size() + cycles[1].size() == 5);

    SearchLimits tight;
    tight.max_states = 1;
    CHECK_THROWS_AS(enumerate_simple_cycles(g, tight), LimitExceeded);

    SearchLimits short_only;
    short_only.max_cycle_len = 2;
    CHECK(enumerate_simple_cycles(g, short_only).size() == 1);
}

TEST_CASE("exact dynamic optimum beats the static one on the example") {
    Instance inst = gen_fig1();
    Execution ex = exact_dynamic_optimal(inst);
    CHECK(ex.size == 4);
    CHECK(ex.optimal);
    CHECK(replay(inst, ex.cycles).size == 4);  // the witness is executable
}

TEST_CASE("greedy stalls after the giant cycle") {
    Instance inst = gen_greedy_family(2, 2);
    Execution greedy = greedy_dynamic(inst);
    CHECK(greedy.size == 4);  // d*l
    Execution exact = exact_dynamic_optimal(inst);
    CHECK(exact.size == 6);  // l + (d-1)*l^2

    // after the giant cycle nothing is executable anymore
    TradingGraph g = initial_graph(inst);
    for (const auto& c : greedy.cycles) g = apply_cycle(g, c);
    CHECK(enumerate_simple_cycles(g).empty());
}

TEST_CASE("demand-everything instances have a gap of l") {
    for (int l = 1; l <= 3; ++l) {
        Instance inst = gen_claim32(l);
        CHECK(solve_static_optimal(inst).size == l + 1);
        CHECK(exact_dynamic_optimal(inst).size == l * (l + 1));
    }
}

TEST_CASE("state budget degrades gracefully") {
    SearchLimits tiny;
    tiny.max_states = 2;
    Execution ex = exact_dynamic_optimal(gen_claim32(2), tiny);
    CHECK_FALSE(ex.optimal);
    CHECK(ex.size <= 6);
}

TEST_CASE("pareto efficiency check") {
    Instance inst = gen_pareto(6);
    int i1 = inst.agent_index("i1"), i2 = inst.agent_index("i2"),
        i3 = inst.agent_index("i3");
    int a = inst.item_index("a"), b = inst.item_index("b"), c = inst.item_index("c");

    Cycle c2 = {{i1, b}, {i3, c}};
    Cycle c3 = {{i1, a}, {i2, b}};
    Execution both = replay(inst, {c2, c3});
    CHECK(social_welfare(both) == 4);
    CHECK(pareto_check(inst, both).efficient);

    Execution only_c2 = replay(inst, {c2});
    ParetoResult r = pareto_check(inst, only_c2);
    CHECK_FALSE(r.efficient);
    REQUIRE(r.witness.has_value());
    CHECK(social_welfare(*r.witness) > social_welfare(only_c2));
}

TEST_CASE("relaxed search on the supply-demand path") {
    Instance inst = gen_utility_path(3);
    RelaxedOptimum opt = exact_relaxed_optimal(inst, Rational(1));
    CHECK(opt.optimal);
    CHECK(opt.welfare == Rational(1));  // sum |D_i| - c = 2 - 1
    CHECK(opt.utilities[inst.agent_index("a3")] == Rational(-1));

    // the execution it found is reproducible through the relaxed replayer
    RelaxedExecution rex = replay_relaxed(inst, opt.cycles);
    CHECK(generalized_welfare(rex, Rational(1)) == opt.welfare);

    // a prohibitive penalty makes staying idle optimal
    RelaxedOptimum idle = exact_relaxed_optimal(inst, Rational(5));
    CHECK(idle.welfare == Rational(0));
    CHECK(idle.cycles.empty());

    // with the last item hidden there are no cycles at all
    Instance hidden = gen_utility_path(3, true);
    CHECK(enumerate_simple_cycles(initial_graph(hidden)).empty());
}
