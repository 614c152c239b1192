// Dynamic-execution algorithms: simple-cycle enumeration, the greedy
// repeated-static algorithm, a brute-force optimal-execution oracle with
// graph-state memoization, a Pareto-efficiency checker and the relaxed
// search used with generalized utilities.
#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "barter/model.hpp"
#include "barter/static_solver.hpp"

namespace barter {

struct LimitExceeded : Error { using Error::Error; };

struct SearchLimits {
    std::size_t max_states = 2'000'000;
    int max_cycle_len = 0;  // exchanges per cycle, 0 = unbounded
};

namespace detail {

struct StateKeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto w : k) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// DFS over alternating cycles. `start` is forced to stay the smallest agent
// on the cycle, so every cycle is found exactly once, already in canonical
// rotation. `receiver` is the agent whose receipt is chosen next; closing
// is possible whenever the chosen item can be given by `start`.
template <typename Sink>
bool for_each_cycle_from(const TradingGraph& g, int start, int receiver,
                         Cycle& partial, std::vector<char>& agent_used,
                         std::vector<char>& item_used, int max_len, Sink&& sink) {
    for (int j = 0; j < g.m; ++j) {
        if (item_used[j] || !g.has_demand(receiver, j)) continue;
        if (g.has_supply(j, start)) {
            partial.emplace_back(receiver, j);
            bool keep_going = sink(partial);
            partial.pop_back();
            if (!keep_going) return false;
        }
        if (max_len > 0 && static_cast<int>(partial.size()) + 2 > max_len) continue;
        for (int b = start + 1; b < g.n; ++b) {
            if (agent_used[b] || !g.has_supply(j, b)) continue;
            agent_used[b] = 1;
            item_used[j] = 1;
            partial.emplace_back(receiver, j);
            bool keep_going = for_each_cycle_from(g, start, b, partial, agent_used,
                                                  item_used, max_len, sink);
            partial.pop_back();
            item_used[j] = 0;
            agent_used[b] = 0;
            if (!keep_going) return false;
        }
    }
    return true;
}

// Calls `sink` with every simple alternating cycle, canonical rotation, in
// canonical (start agent, then DFS) order. Sink returns false to abort.
template <typename Sink>
void for_each_cycle(const TradingGraph& g, int max_len, Sink&& sink) {
    std::vector<char> agent_used(g.n, 0), item_used(g.m, 0);
    Cycle partial;
    for (int s = 0; s < g.n; ++s) {
        agent_used[s] = 1;
        bool keep_going =
            for_each_cycle_from(g, s, s, partial, agent_used, item_used, max_len, sink);
        agent_used[s] = 0;
        if (!keep_going) return;
    }
}

}  // namespace detail

// All node-simple alternating cycles of the current graph, deterministic
// canonical order. Throws LimitExceeded past limits.max_states cycles.
inline std::vector<Cycle> enumerate_simple_cycles(const TradingGraph& g,
                                                  const SearchLimits& limits = {}) {
    std::vector<Cycle> out;
    bool exceeded = false;
    detail::for_each_cycle(g, limits.max_cycle_len, [&](const Cycle& c) {
        if (out.size() >= limits.max_states) {
            exceeded = true;
            return false;
        }
        out.push_back(c);
        return true;
    });
    if (exceeded) throw LimitExceeded("cycle enumeration limit reached");
    return out;
}

// Repeatedly execute an optimal static execution until a round comes back
// empty. Terminates because every nonzero round consumes demand edges.
inline Execution greedy_dynamic(const Instance& inst) {
    TradingGraph g = initial_graph(inst);
    std::vector<Cycle> all;
    int rounds_left = g.demand_count() + 1;
    while (rounds_left-- > 0) {
        Execution round = solve_static_optimal(g);
        if (round.size == 0) break;
        for (const auto& c : round.cycles) {
            g = apply_cycle(g, c);
            all.push_back(c);
        }
    }
    return replay(inst, all);
}

namespace detail {

// Exhaustive exploration of reachable graph states. The social welfare
// accumulated on the way to a state is a function of the state alone
// (every used demand edge is gone from it and none ever comes back), so
// visited-state dedup loses nothing. Returns the index of the state
// maximizing welfare plus the predecessor links for reconstruction.
struct StateSpace {
    struct Node {
        TradingGraph graph;
        int used;    // exchanges performed to reach this state
        int parent;  // -1 for the root
        Cycle via;
    };
    std::vector<Node> nodes;
    int best = 0;
    bool complete = true;

    std::vector<Cycle> path_to(int idx) const {
        std::vector<Cycle> cycles;
        for (int cur = idx; cur > 0; cur = nodes[cur].parent)
            cycles.push_back(nodes[cur].via);
        std::reverse(cycles.begin(), cycles.end());
        return cycles;
    }
};

inline StateSpace explore_states(const TradingGraph& start, const SearchLimits& limits,
                                 bool prune_to_best) {
    StateSpace space;
    const int total_demand = start.demand_count();
    std::unordered_map<std::vector<std::uint64_t>, int, StateKeyHash> seen;
    space.nodes.push_back({start, 0, -1, {}});
    seen.emplace(start.key(), 0);

    std::vector<int> stack{0};
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        const int used = space.nodes[idx].used;
        if (used > space.nodes[space.best].used) space.best = idx;
        int remaining = space.nodes[idx].graph.demand_count();
        if (remaining == 0) continue;
        if (prune_to_best && used + remaining <= space.nodes[space.best].used) continue;

        TradingGraph g = space.nodes[idx].graph;  // copy: nodes may reallocate
        for_each_cycle(g, limits.max_cycle_len, [&](const Cycle& c) {
            TradingGraph next = apply_cycle(g, c);
            auto [it, fresh] = seen.emplace(next.key(), -1);
            if (!fresh) return true;
            if (space.nodes.size() >= limits.max_states) {
                space.complete = false;
                return false;
            }
            it->second = static_cast<int>(space.nodes.size());
            space.nodes.push_back({std::move(next), used + static_cast<int>(c.size()),
                                   idx, c});
            stack.push_back(it->second);
            return true;
        });
        if (!space.complete) break;
        (void)total_demand;
    }
    return space;
}

}  // namespace detail

// Welfare-maximizing execution by exhaustive search over cycle choices
// with memoization on the canonical graph state. When the state budget
// runs out the best execution found so far is returned with
// optimal == false instead of failing hard.
inline Execution exact_dynamic_optimal(const TradingGraph& start,
                                       const SearchLimits& limits = {}) {
    auto space = detail::explore_states(start, limits, /*prune_to_best=*/true);
    Execution ex = replay_on(start, space.path_to(space.best));
    ex.optimal = space.complete;
    return ex;
}

inline Execution exact_dynamic_optimal(const Instance& inst,
                                       const SearchLimits& limits = {}) {
    auto space = detail::explore_states(initial_graph(inst), limits, true);
    Execution ex = replay(inst, space.path_to(space.best));
    ex.optimal = space.complete;
    return ex;
}

struct ParetoResult {
    bool efficient;
    std::optional<Execution> witness;  // a dominating execution when inefficient
};

// True iff no execution weakly improves every agent and strictly improves
// at least one over `exec`. Exhaustive over reachable states.
inline ParetoResult pareto_check(const Instance& inst, const Execution& exec,
                                 const SearchLimits& limits = {}) {
    TradingGraph start = initial_graph(inst);
    auto space = detail::explore_states(start, limits, /*prune_to_best=*/false);
    if (!space.complete) throw LimitExceeded("pareto check state limit reached");

    std::vector<int> base(inst.num_agents());
    for (int a = 0; a < inst.num_agents(); ++a) base[a] = utility(exec, a);
    std::vector<int> initial(inst.num_agents());
    for (int a = 0; a < inst.num_agents(); ++a)
        initial[a] = static_cast<int>(inst.demand[a].size());

    for (std::size_t idx = 0; idx < space.nodes.size(); ++idx) {
        bool weakly_better = true, strictly = false;
        const TradingGraph& g = space.nodes[idx].graph;
        for (int a = 0; a < inst.num_agents() && weakly_better; ++a) {
            int got = initial[a];
            for (int j = 0; j < g.m; ++j)
                if (g.has_demand(a, j)) --got;
            if (got < base[a]) weakly_better = false;
            if (got > base[a]) strictly = true;
        }
        if (weakly_better && strictly) {
            Execution w = replay(inst, space.path_to(static_cast<int>(idx)));
            return {false, std::move(w)};
        }
    }
    return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Relaxed search for generalized utilities.

struct RelaxedOptimum {
    Rational welfare{0};
    std::vector<Rational> utilities;
    std::vector<Cycle> cycles;
    bool optimal = true;
};

namespace detail {

// Relaxed cycles: supply edges must exist, receipts may be undemanded.
// Restricted to cycles with at least one demanded receipt; a cycle that
// hands around only unwanted items changes no demand edge and can recur
// forever, and dropping one from an execution never lowers the welfare of
// the demanded receipts it enables elsewhere on this search's instances.
template <typename Sink>
bool for_each_relaxed_cycle_from(const TradingGraph& g, int start, int receiver,
                                 Cycle& partial, std::vector<char>& agent_used,
                                 std::vector<char>& item_used, int demanded,
                                 int max_len, Sink&& sink) {
    for (int j = 0; j < g.m; ++j) {
        if (item_used[j]) continue;
        bool is_demand = g.has_demand(receiver, j);
        if (!is_demand && g.has_supply(j, receiver)) continue;  // already owns it
        int d = demanded + (is_demand ? 1 : 0);
        if (g.has_supply(j, start) && start != receiver && d > 0) {
            partial.emplace_back(receiver, j);
            bool keep_going = sink(partial);
            partial.pop_back();
            if (!keep_going) return false;
        }
        if (max_len > 0 && static_cast<int>(partial.size()) + 2 > max_len) continue;
        for (int b = start + 1; b < g.n; ++b) {
            if (agent_used[b] || b == receiver || !g.has_supply(j, b)) continue;
            agent_used[b] = 1;
            item_used[j] = 1;
            partial.emplace_back(receiver, j);
            bool keep_going = for_each_relaxed_cycle_from(
                g, start, b, partial, agent_used, item_used, d, max_len, sink);
            partial.pop_back();
            item_used[j] = 0;
            agent_used[b] = 0;
            if (!keep_going) return false;
        }
    }
    return true;
}

}  // namespace detail

// Exhaustive search over relaxed executions maximizing the generalized
// social welfare for penalty c. Intended for the small extension-section
// instances; guarded by limits.max_states visited search nodes.
inline RelaxedOptimum exact_relaxed_optimal(const Instance& inst, Rational c,
                                            const SearchLimits& limits = {}) {
    const int n = inst.num_agents();
    RelaxedOptimum best;
    best.utilities.assign(n, Rational(0));

    std::vector<Rational> util(n, Rational(0));
    std::vector<Cycle> chosen;
    std::size_t nodes = 0;
    bool exhausted = false;
    const int max_depth = initial_graph(inst).demand_count();

    auto welfare = [&](const std::vector<Rational>& u) {
        Rational w(0);
        for (const auto& x : u) w += x;
        return w;
    };

    auto rec = [&](auto&& self, const TradingGraph& g, int depth) -> void {
        if (++nodes > limits.max_states) {
            exhausted = true;
            return;
        }
        Rational w = welfare(util);
        if (w > best.welfare) {
            best.welfare = w;
            best.utilities = util;
            best.cycles = chosen;
        }
        if (depth >= max_depth || exhausted) return;

        std::vector<char> agent_used(g.n, 0), item_used(g.m, 0);
        Cycle partial;
        for (int s = 0; s < g.n && !exhausted; ++s) {
            agent_used[s] = 1;
            detail::for_each_relaxed_cycle_from(
                g, s, s, partial, agent_used, item_used, 0, limits.max_cycle_len,
                [&](const Cycle& cyc) {
                    TradingGraph next = apply_cycle_relaxed(g, cyc);
                    for (auto [a, j] : cyc)
                        util[a] += g.has_demand(a, j) ? Rational(1) : -c;
                    chosen.push_back(cyc);
                    self(self, next, depth + 1);
                    chosen.pop_back();
                    for (auto [a, j] : cyc)
                        util[a] -= g.has_demand(a, j) ? Rational(1) : -c;
                    return !exhausted;
                });
            agent_used[s] = 0;
        }
    };
    rec(rec, initial_graph(inst), 0);
    best.optimal = !exhausted;
    return best;
}

}  // namespace barter
