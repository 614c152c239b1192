// Core data model for barter exchange on dynamic trading graphs:
// instances, trading graphs, cycle steps, executions and utilities.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace barter {

using Rational = boost::rational<long long>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PartitionViolation : Error { using Error::Error; };
struct SelfDemand : Error { using Error::Error; };
struct UnknownId : Error { using Error::Error; };
struct InvalidReports : Error { using Error::Error; };
struct NoPerfectMatching : Error { using Error::Error; };
struct MalformedMatching : Error { using Error::Error; };
struct NotStatic : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct BadParams : Error { using Error::Error; };

struct InvalidCycle : Error {
    explicit InvalidCycle(const std::string& what, int index = -1)
        : Error(what), index(index) {}
    int index;  // position in the execution, -1 for a standalone cycle
};

// Agents and items are addressed by their index in the instance's input
// lists; that position is the canonical order used everywhere (iteration,
// tie-breaking, perturbation numbering).
struct AgentSpec {
    std::string id;
    std::vector<std::string> demand;
    std::vector<std::string> supply;
};

class Instance {
public:
    std::vector<std::string> agent_names;
    std::vector<std::string> item_names;
    std::vector<std::vector<int>> demand;  // per agent, sorted item indices
    std::vector<std::vector<int>> supply;  // per agent, sorted item indices
    // Relaxed instances may violate the one-owner-per-item partition
    // (reversed instances and the 3DM reduction for |X| >= 2 need this).
    bool relaxed = false;

    int num_agents() const { return static_cast<int>(agent_names.size()); }
    int num_items() const { return static_cast<int>(item_names.size()); }

    int agent_index(const std::string& id) const {
        for (int i = 0; i < num_agents(); ++i)
            if (agent_names[i] == id) return i;
        throw UnknownId("unknown agent id: " + id);
    }
    int item_index(const std::string& id) const {
        for (int j = 0; j < num_items(); ++j)
            if (item_names[j] == id) return j;
        throw UnknownId("unknown item id: " + id);
    }

    // l = max_i |D_i|
    int max_demand() const {
        int l = 0;
        for (const auto& d : demand) l = std::max<int>(l, d.size());
        return l;
    }
    int total_demand() const {
        int t = 0;
        for (const auto& d : demand) t += static_cast<int>(d.size());
        return t;
    }

    bool demands(int agent, int item) const {
        return std::binary_search(demand[agent].begin(), demand[agent].end(), item);
    }
    bool owns(int agent, int item) const {
        return std::binary_search(supply[agent].begin(), supply[agent].end(), item);
    }
};

namespace detail {

inline Instance build_instance(std::vector<std::string> items,
                               const std::vector<AgentSpec>& agents,
                               bool relaxed) {
    Instance inst;
    inst.item_names = std::move(items);
    inst.relaxed = relaxed;
    {
        std::set<std::string> seen;
        for (const auto& it : inst.item_names)
            if (!seen.insert(it).second)
                throw BadParams("duplicate item id: " + it);
    }
    std::set<std::string> seen_agents;
    for (const auto& a : agents) {
        if (!seen_agents.insert(a.id).second)
            throw BadParams("duplicate agent id: " + a.id);
        inst.agent_names.push_back(a.id);
    }
    std::vector<int> owners(inst.item_names.size(), 0);
    for (const auto& a : agents) {
        std::vector<int> d, s;
        for (const auto& it : a.demand) d.push_back(inst.item_index(it));
        for (const auto& it : a.supply) s.push_back(inst.item_index(it));
        std::sort(d.begin(), d.end());
        std::sort(s.begin(), s.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (int j : s) ++owners[j];
        std::vector<int> both;
        std::set_intersection(d.begin(), d.end(), s.begin(), s.end(),
                              std::back_inserter(both));
        if (!both.empty())
            throw SelfDemand("agent " + a.id + " demands an item he owns: " +
                             inst.item_names[both.front()]);
        inst.demand.push_back(std::move(d));
        inst.supply.push_back(std::move(s));
    }
    if (!relaxed) {
        for (std::size_t j = 0; j < owners.size(); ++j)
            if (owners[j] != 1)
                throw PartitionViolation("item " + inst.item_names[j] + " owned by " +
                                         std::to_string(owners[j]) + " agents");
    }
    return inst;
}

}  // namespace detail

// Validated instance: supply sets partition the items, D_i and S_i disjoint.
inline Instance make_instance(std::vector<std::string> items,
                              const std::vector<AgentSpec>& agents) {
    return detail::build_instance(std::move(items), agents, false);
}

// Same validation except the ownership partition; items may have zero or
// several owners.
inline Instance make_relaxed_instance(std::vector<std::string> items,
                                      const std::vector<AgentSpec>& agents) {
    return detail::build_instance(std::move(items), agents, true);
}

// Swap every agent's demand and supply. The result is relaxed: distinct
// agents may demand the same item, so the reversed supply sets need not
// partition the items.
inline Instance reverse_instance(const Instance& inst) {
    Instance rev = inst;
    std::swap(rev.demand, rev.supply);
    rev.relaxed = true;
    return rev;
}

// Fixed-size bitset keyed by agent*m+item, used both for the trading graph
// edge sets and as the memo key of the dynamic search.
class EdgeSet {
public:
    EdgeSet() = default;
    explicit EdgeSet(int bits) : bits_(bits), w_((bits + 63) / 64, 0) {}

    bool test(int b) const { return (w_[b >> 6] >> (b & 63)) & 1u; }
    void set(int b) { w_[b >> 6] |= std::uint64_t{1} << (b & 63); }
    void reset(int b) { w_[b >> 6] &= ~(std::uint64_t{1} << (b & 63)); }

    int count() const {
        int c = 0;
        for (auto x : w_) c += __builtin_popcountll(x);
        return c;
    }

    const std::vector<std::uint64_t>& words() const { return w_; }
    bool operator==(const EdgeSet&) const = default;

private:
    int bits_ = 0;
    std::vector<std::uint64_t> w_;
};

// Mutable directed bipartite state. A demand edge (a, j) means agent a
// currently demands item j; a supply edge (j, a) means a currently owns j.
// Both are stored at bit a*m+j. The pair (a,j) is never simultaneously a
// demand and a supply edge.
class TradingGraph {
public:
    TradingGraph() = default;
    TradingGraph(int n, int m)
        : n(n), m(m), demand(n * m == 0 ? 1 : n * m), supply(n * m == 0 ? 1 : n * m) {}

    int n = 0, m = 0;
    EdgeSet demand;
    EdgeSet supply;

    bool has_demand(int a, int j) const { return demand.test(a * m + j); }
    bool has_supply(int j, int a) const { return supply.test(a * m + j); }
    void add_demand(int a, int j) { demand.set(a * m + j); }
    void add_supply(int j, int a) { supply.set(a * m + j); }
    void remove_demand(int a, int j) { demand.reset(a * m + j); }
    void remove_supply(int j, int a) { supply.reset(a * m + j); }

    int demand_count() const { return demand.count(); }
    int edge_count() const { return demand.count() + supply.count(); }

    // Demand edges as (agent, item), lexicographic.
    std::vector<std::pair<int, int>> demand_edges() const {
        std::vector<std::pair<int, int>> out;
        for (int a = 0; a < n; ++a)
            for (int j = 0; j < m; ++j)
                if (has_demand(a, j)) out.emplace_back(a, j);
        return out;
    }
    // Supply edges as (item, agent), lexicographic.
    std::vector<std::pair<int, int>> supply_edges() const {
        std::vector<std::pair<int, int>> out;
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < n; ++a)
                if (has_supply(j, a)) out.emplace_back(j, a);
        return out;
    }

    // Canonical state key (demand words then supply words) for memo tables.
    std::vector<std::uint64_t> key() const {
        std::vector<std::uint64_t> k = demand.words();
        k.insert(k.end(), supply.words().begin(), supply.words().end());
        return k;
    }

    bool operator==(const TradingGraph&) const = default;
};

inline TradingGraph initial_graph(const Instance& inst) {
    TradingGraph g(inst.num_agents(), inst.num_items());
    for (int a = 0; a < g.n; ++a) {
        for (int j : inst.demand[a]) g.add_demand(a, j);
        for (int j : inst.supply[a]) g.add_supply(j, a);
    }
    return g;
}

// A cycle is the alternating sequence a_1, j_1, ..., a_k, j_k closing back
// to a_1, stored as the (agent, item) receipt pairs. Step t uses demand
// edge (a_t, j_t) and supply edge (j_t, a_{t+1 mod k}).
using Cycle = std::vector<std::pair<int, int>>;

// Rotate so the smallest agent index comes first. Agents in a simple cycle
// are distinct, so this is a unique canonical form.
inline Cycle canonical_cycle(Cycle c) {
    if (c.empty()) return c;
    auto it = std::min_element(c.begin(), c.end());
    std::rotate(c.begin(), it, c.end());
    return c;
}

inline void check_cycle(const TradingGraph& g, const Cycle& c, int index = -1) {
    if (c.empty()) throw InvalidCycle("empty cycle", index);
    const int k = static_cast<int>(c.size());
    std::set<int> agents, items;
    for (auto [a, j] : c) {
        if (a < 0 || a >= g.n || j < 0 || j >= g.m)
            throw InvalidCycle("node out of range", index);
        if (!agents.insert(a).second)
            throw InvalidCycle("agent repeated in cycle", index);
        if (!items.insert(j).second)
            throw InvalidCycle("item repeated in cycle", index);
    }
    for (int t = 0; t < k; ++t) {
        auto [a, j] = c[t];
        int next_agent = c[(t + 1) % k].first;
        if (!g.has_demand(a, j))
            throw InvalidCycle("missing demand edge", index);
        if (!g.has_supply(j, next_agent))
            throw InvalidCycle("missing supply edge", index);
    }
}

// E' = (E \ C) u {(j_t, a_t)}: demand edges of the cycle flip into supply
// edges, supply edges of the cycle are removed.
inline TradingGraph apply_cycle(const TradingGraph& g, const Cycle& c, int index = -1) {
    check_cycle(g, c, index);
    TradingGraph out = g;
    const int k = static_cast<int>(c.size());
    for (int t = 0; t < k; ++t) {
        auto [a, j] = c[t];
        out.remove_demand(a, j);
        out.remove_supply(j, c[(t + 1) % k].first);
    }
    for (auto [a, j] : c) out.add_supply(j, a);
    return out;
}

struct Execution {
    std::vector<Cycle> cycles;
    std::vector<std::vector<int>> received;  // A_i(r), in receipt order
    std::vector<std::vector<int>> given;     // B_i(r), in giving order
    int size = 0;                            // |r|
    bool optimal = true;  // false when a search gave up under its limits
};

inline Execution replay_on(const TradingGraph& start, const std::vector<Cycle>& cycles) {
    Execution ex;
    ex.received.assign(start.n, {});
    ex.given.assign(start.n, {});
    TradingGraph g = start;
    int index = 0;
    for (const auto& c : cycles) {
        g = apply_cycle(g, c, index);
        const int k = static_cast<int>(c.size());
        for (int t = 0; t < k; ++t) {
            auto [a, j] = c[t];
            ex.received[a].push_back(j);
            ex.given[c[(t + 1) % k].first].push_back(j);
        }
        ex.size += k;
        ex.cycles.push_back(c);
        ++index;
    }
    return ex;
}

inline Execution replay(const Instance& inst, const std::vector<Cycle>& cycles) {
    return replay_on(initial_graph(inst), cycles);
}

inline int utility(const Execution& ex, int agent) {
    if (agent < 0 || agent >= static_cast<int>(ex.received.size()))
        throw UnknownId("agent index out of range");
    return static_cast<int>(ex.received[agent].size());
}

inline int social_welfare(const Execution& ex) { return ex.size; }

// Relaxed replay: a receipt does not need a demand edge. Used only for the
// generalized utility function; the strict utility of such an execution
// would be the -n*m penalty, here it is the per-item cost c instead.
struct RelaxedExecution {
    Execution exec;
    std::vector<std::vector<int>> undemanded;  // receipts outside the current demand set
};

// A relaxed cycle still needs every supply edge and simple alternation, and
// an agent may not hand an item to himself.
inline void check_cycle_relaxed(const TradingGraph& g, const Cycle& c, int index = -1) {
    if (c.empty()) throw InvalidCycle("empty cycle", index);
    const int k = static_cast<int>(c.size());
    std::set<int> agents, items;
    for (auto [a, j] : c) {
        if (a < 0 || a >= g.n || j < 0 || j >= g.m)
            throw InvalidCycle("node out of range", index);
        if (!agents.insert(a).second)
            throw InvalidCycle("agent repeated in cycle", index);
        if (!items.insert(j).second)
            throw InvalidCycle("item repeated in cycle", index);
    }
    for (int t = 0; t < k; ++t) {
        auto [a, j] = c[t];
        int giver = c[(t + 1) % k].first;
        if (giver == a) throw InvalidCycle("self trade", index);
        if (!g.has_supply(j, giver))
            throw InvalidCycle("missing supply edge", index);
        if (g.has_supply(j, a))
            throw InvalidCycle("receiver already owns the item", index);
    }
}

inline TradingGraph apply_cycle_relaxed(const TradingGraph& g, const Cycle& c,
                                        int index = -1) {
    check_cycle_relaxed(g, c, index);
    TradingGraph out = g;
    const int k = static_cast<int>(c.size());
    for (int t = 0; t < k; ++t) {
        auto [a, j] = c[t];
        if (out.has_demand(a, j)) out.remove_demand(a, j);
        out.remove_supply(j, c[(t + 1) % k].first);
    }
    for (auto [a, j] : c) out.add_supply(j, a);
    return out;
}

inline RelaxedExecution replay_relaxed(const Instance& inst,
                                       const std::vector<Cycle>& cycles) {
    RelaxedExecution rex;
    rex.exec.received.assign(inst.num_agents(), {});
    rex.exec.given.assign(inst.num_agents(), {});
    rex.undemanded.assign(inst.num_agents(), {});
    TradingGraph g = initial_graph(inst);
    int index = 0;
    for (const auto& c : cycles) {
        TradingGraph next = apply_cycle_relaxed(g, c, index);
        const int k = static_cast<int>(c.size());
        for (int t = 0; t < k; ++t) {
            auto [a, j] = c[t];
            if (!g.has_demand(a, j)) rex.undemanded[a].push_back(j);
            rex.exec.received[a].push_back(j);
            rex.exec.given[c[(t + 1) % k].first].push_back(j);
        }
        rex.exec.size += k;
        rex.exec.cycles.push_back(c);
        g = next;
        ++index;
    }
    return rex;
}

// Generalized utility: demanded receipts minus c per undemanded receipt,
// judged against the demand set current at the time of the receipt.
inline Rational generalized_utility(const RelaxedExecution& rex, Rational c, int agent) {
    if (agent < 0 || agent >= static_cast<int>(rex.exec.received.size()))
        throw UnknownId("agent index out of range");
    long long bad = static_cast<long long>(rex.undemanded[agent].size());
    long long good = static_cast<long long>(rex.exec.received[agent].size()) - bad;
    return Rational(good) - c * Rational(bad);
}

inline Rational generalized_welfare(const RelaxedExecution& rex, Rational c) {
    Rational w(0);
    for (int a = 0; a < static_cast<int>(rex.exec.received.size()); ++a)
        w += generalized_utility(rex, c, a);
    return w;
}

// Allocation form: received item multisets scored against the initial
// demand sets.
inline Rational generalized_welfare(const Instance& inst,
                                    const std::vector<std::vector<int>>& received,
                                    Rational c) {
    if (static_cast<int>(received.size()) != inst.num_agents())
        throw UnknownId("allocation size does not match the instance");
    Rational w(0);
    for (int a = 0; a < inst.num_agents(); ++a) {
        long long good = 0, bad = 0;
        for (int j : received[a]) {
            if (j < 0 || j >= inst.num_items())
                throw UnknownId("item index out of range");
            (inst.demands(a, j) ? good : bad)++;
        }
        w += Rational(good) - c * Rational(bad);
    }
    return w;
}

}  // namespace barter
