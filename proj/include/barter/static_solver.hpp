// Optimal static executions via maximum-weight perfect matching on the
// edge graph H(G), the perturbed graph H'(G), and the tie-broken
// strategyproof mechanism A_s built on top of it.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "barter/assignment.hpp"
#include "barter/model.hpp"

namespace barter {

// A trading-graph edge, playing the role of a node of H(G). Both copies
// (e,0) and (e,1) share the index of `e` in the canonical edge list.
struct EdgeRef {
    bool is_demand;  // demand a->j, otherwise supply j->a
    int a, j;

    // Node ids in the combined agent/item space: agents [0,n), items [n,n+m).
    int tail(int n) const { return is_demand ? a : n + j; }
    int head(int n) const { return is_demand ? n + j : a; }

    bool operator==(const EdgeRef&) const = default;
};

// Canonical edge list: demand edges by (agent, item), then supply edges by
// (item, agent).
inline std::vector<EdgeRef> edge_list(const TradingGraph& g) {
    std::vector<EdgeRef> edges;
    for (auto [a, j] : g.demand_edges()) edges.push_back({true, a, j});
    for (auto [j, a] : g.supply_edges()) edges.push_back({false, a, j});
    return edges;
}

// A bijection from (agent, item) pairs onto {1, ..., n*m}. The default is
// lexicographic: pi(a, j) = a*m + j + 1.
class PerturbationOrder {
public:
    PerturbationOrder(int n, int m) : n_(n), m_(m), pi_(std::max(n * m, 1)) {
        std::iota(pi_.begin(), pi_.end(), 1);
    }
    PerturbationOrder(int n, int m, std::vector<int> pi)
        : n_(n), m_(m), pi_(std::move(pi)) {
        if (static_cast<int>(pi_.size()) != n * m)
            throw BadParams("perturbation order has wrong size");
        std::vector<char> seen(n * m + 1, 0);
        for (int v : pi_) {
            if (v < 1 || v > n * m || seen[v])
                throw BadParams("perturbation order is not a bijection onto 1..n*m");
            seen[v] = 1;
        }
    }

    int pi(int a, int j) const { return pi_[a * m_ + j]; }
    int scale_exponent() const { return n_ * m_; }  // P = n*m

private:
    int n_, m_;
    std::vector<int> pi_;
};

struct EdgeGraph {
    std::vector<EdgeRef> edges;
    BipartiteWeightedGraph bip;  // node i on each side = edges[i]
};

namespace detail {

// E_1 self-pairs get weight 0; each consecutive pair ((e,0),(e',1)) with
// head(e) = tail(e') gets `base` plus, when perturbing, 2^(P - pi(e)).
// pi is keyed by the (agent, item) pair of the 0-side edge; for a demand
// edge that is the receipt it encodes, for a supply edge the give, and the
// two can never coexist for one pair, which is what makes the perturbation
// exponents unique within a matching.
inline EdgeGraph build_edge_graph_impl(const TradingGraph& g,
                                       const PerturbationOrder* order) {
    EdgeGraph eg;
    eg.edges = edge_list(g);
    const int ne = static_cast<int>(eg.edges.size());
    eg.bip = BipartiteWeightedGraph(ne);

    Weight base{1};
    if (order != nullptr) base = Weight{1} << order->scale_exponent();

    std::vector<std::vector<int>> out_of_node(g.n + g.m);
    for (int i = 0; i < ne; ++i) out_of_node[eg.edges[i].tail(g.n)].push_back(i);

    for (int i = 0; i < ne; ++i) {
        eg.bip.add_edge(i, i, Weight{0});
        Weight w = base;
        if (order != nullptr) {
            int p = order->scale_exponent() - order->pi(eg.edges[i].a, eg.edges[i].j);
            w += Weight{1} << p;
        }
        for (int succ : out_of_node[eg.edges[i].head(g.n)])
            eg.bip.add_edge(i, succ, w);
    }
    return eg;
}

}  // namespace detail

// H(G): unperturbed, E_2 weight 1.
inline EdgeGraph build_edge_graph(const TradingGraph& g) {
    return detail::build_edge_graph_impl(g, nullptr);
}

// H'(G): integral scaling by 2^P, P = n*m, so every weight is exact:
// E_2 weight 2^P + 2^(P - pi). floor(w / 2^P) recovers the H(G) weight.
inline EdgeGraph build_perturbed_edge_graph(const TradingGraph& g,
                                            const PerturbationOrder& order) {
    return detail::build_edge_graph_impl(g, &order);
}

// Decode a perfect matching into a static execution: edges not matched to
// their own copy form a subgraph with balanced degrees; following the
// matching's successor permutation yields closed walks which are split
// into simple cycles. |r| = |E_2 cap M| / 2.
inline Execution matching_to_execution(const TradingGraph& g, const EdgeGraph& eg,
                                       const Matching& matching) {
    const int ne = static_cast<int>(eg.edges.size());
    if (static_cast<int>(matching.right_of.size()) != ne)
        throw MalformedMatching("matching size does not fit the edge graph");

    std::vector<char> consumed(ne, 0);
    std::vector<Cycle> cycles;
    for (int start = 0; start < ne; ++start) {
        if (consumed[start] || matching.right_of[start] == start) continue;
        // Closed edge walk of the successor permutation through `start`.
        std::vector<int> walk;
        int cur = start;
        do {
            if (cur < 0 || cur >= ne || consumed[cur] || matching.right_of[cur] == cur)
                throw MalformedMatching("successor chain escapes the cycle edges");
            consumed[cur] = 1;
            walk.push_back(cur);
            cur = matching.right_of[cur];
        } while (cur != start);

        // Split the complex walk into simple cycles with a tail-node stack.
        std::vector<int> stack;
        std::map<int, int> pos;  // tail node -> index in stack
        auto emit = [&](std::size_t from) {
            Cycle c;
            for (std::size_t t = from; t < stack.size(); ++t) {
                const EdgeRef& e = eg.edges[stack[t]];
                if (e.is_demand) c.emplace_back(e.a, e.j);
            }
            cycles.push_back(canonical_cycle(c));
            for (std::size_t t = from; t < stack.size(); ++t)
                pos.erase(eg.edges[stack[t]].tail(g.n));
            stack.resize(from);
        };
        for (int ei : walk) {
            int v = eg.edges[ei].tail(g.n);
            auto it = pos.find(v);
            if (it != pos.end()) emit(it->second);
            pos[v] = static_cast<int>(stack.size());
            stack.push_back(ei);
        }
        emit(0);
    }
    return replay_on(g, cycles);
}

// Encode a static execution back into a perfect matching of weight 2|r|:
// consecutive cycle edges matched to each other, unused edges self-matched.
inline Matching execution_to_matching(const TradingGraph& g, const EdgeGraph& eg,
                                      const Execution& exec) {
    const int ne = static_cast<int>(eg.edges.size());
    std::map<std::tuple<bool, int, int>, int> index;
    for (int i = 0; i < ne; ++i)
        index[{eg.edges[i].is_demand, eg.edges[i].a, eg.edges[i].j}] = i;
    auto lookup = [&](bool is_demand, int a, int j) {
        auto it = index.find({is_demand, a, j});
        if (it == index.end())
            throw InvalidCycle("execution uses an edge outside the trading graph");
        return it->second;
    };

    Matching m;
    m.right_of.assign(ne, -1);
    auto match = [&](int left, int right) {
        if (m.right_of[left] != -1)
            throw NotStatic("edge reused across cycles");
        m.right_of[left] = right;
    };
    for (const auto& c : exec.cycles) {
        const int k = static_cast<int>(c.size());
        for (int t = 0; t < k; ++t) {
            auto [a, j] = c[t];
            int next_agent = c[(t + 1) % k].first;
            int next_item = c[(t + 1) % k].second;
            int d = lookup(true, a, j);
            int s = lookup(false, next_agent, j);
            match(d, s);
            match(s, lookup(true, next_agent, next_item));
        }
    }
    for (int i = 0; i < ne; ++i)
        if (m.right_of[i] == -1) m.right_of[i] = i;

    std::vector<char> taken(ne, 0);
    for (int i = 0; i < ne; ++i) {
        int r = m.right_of[i];
        if (taken[r]) throw NotStatic("execution is not static");
        taken[r] = 1;
        const Weight* w = eg.bip.weight(i, r);
        if (w == nullptr) throw MalformedMatching("pair missing from the edge graph");
        m.weight += *w;
    }
    return m;
}

// Optimal static execution of the current graph (maximum exchanges among
// executions that allocate each item at most once).
inline Execution solve_static_optimal(const TradingGraph& g) {
    EdgeGraph eg = build_edge_graph(g);
    Matching m = max_weight_perfect_matching(eg.bip);
    return matching_to_execution(g, eg, m);
}

inline Execution solve_static_optimal(const Instance& inst) {
    return solve_static_optimal(initial_graph(inst));
}

// Per-agent reports over a fixed item universe.
struct Report {
    std::vector<int> demand, supply;
};

// Build the instance induced by the reports. Unlike truthful instances an
// agent may decline to report items, so items can end up unowned; two
// agents claiming the same item is rejected.
inline Instance report_instance(const Instance& universe,
                                const std::vector<Report>& reports) {
    if (static_cast<int>(reports.size()) != universe.num_agents())
        throw InvalidReports("one report per agent required");
    std::vector<AgentSpec> specs;
    std::vector<int> owners(universe.num_items(), 0);
    for (int a = 0; a < universe.num_agents(); ++a) {
        AgentSpec s;
        s.id = universe.agent_names[a];
        for (int j : reports[a].demand) {
            if (j < 0 || j >= universe.num_items())
                throw UnknownId("reported demand item out of range");
            s.demand.push_back(universe.item_names[j]);
        }
        for (int j : reports[a].supply) {
            if (j < 0 || j >= universe.num_items())
                throw UnknownId("reported supply item out of range");
            ++owners[j];
            s.supply.push_back(universe.item_names[j]);
        }
        specs.push_back(std::move(s));
    }
    // in a strict universe two claims on one item are physically
    // inconsistent; a relaxed universe has shared ownership to begin with
    if (!universe.relaxed)
        for (int j = 0; j < universe.num_items(); ++j)
            if (owners[j] > 1)
                throw InvalidReports("item " + universe.item_names[j] +
                                     " claimed by several agents");
    try {
        return make_relaxed_instance(universe.item_names, specs);
    } catch (const SelfDemand&) {
        throw InvalidReports("an agent reports demand for an item he claims to own");
    }
}

// The mechanism A_s: maximum-weight perfect matching of H'(G) under the
// canonical perturbation order, decoded to a static execution. Residual
// tie-breaking in the matcher cannot change any agent's utility.
inline Execution solve_As(const Instance& reported) {
    TradingGraph g = initial_graph(reported);
    PerturbationOrder order(g.n, g.m);
    EdgeGraph eg = build_perturbed_edge_graph(g, order);
    Matching m = max_weight_perfect_matching(eg.bip);
    return matching_to_execution(g, eg, m);
}

inline Execution solve_As(const Instance& universe, const std::vector<Report>& reports) {
    return solve_As(report_instance(universe, reports));
}

}  // namespace barter
