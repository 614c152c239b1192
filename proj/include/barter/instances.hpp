// Instance generators for the benchmark constructions, a 3D-matching
// brute-force solver, random instances and JSON/DOT serialization.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "barter/model.hpp"

namespace barter {

struct InvalidTDM : Error { using Error::Error; };

// The 3-agent running example: a wants x and owns z, b wants y and owns x,
// c wants x and z and owns y. Dynamic optimum 4, static optimum 3.
inline Instance gen_fig1() {
    return make_instance({"x", "y", "z"},
                         {{"a", {"x"}, {"z"}},
                          {"b", {"y"}, {"x"}},
                          {"c", {"x", "z"}, {"y"}}});
}

// l+1 agents on l+1 items, S_i = {i}, D_i = everything else. The dynamic
// optimum l(l+1) serves every demand; a static execution is one big cycle
// of l+1 exchanges, a gap of exactly l.
inline Instance gen_claim32(int l) {
    if (l < 1) throw BadParams("gen_claim32 needs l >= 1");
    std::vector<std::string> items;
    for (int i = 0; i <= l; ++i) items.push_back("j" + std::to_string(i + 1));
    std::vector<AgentSpec> agents;
    for (int i = 0; i <= l; ++i) {
        AgentSpec a;
        a.id = "i" + std::to_string(i + 1);
        a.supply = {items[i]};
        for (int j = 0; j <= l; ++j)
            if (j != i) a.demand.push_back(items[j]);
        agents.push_back(std::move(a));
    }
    return make_instance(std::move(items), agents);
}

// The path length that makes the lower-bound argument airtight for all
// algorithms; desk-scale tests can pass something much smaller.
inline int thm41_paper_path_len(int l) { return (l + 1) * (l * l + l) / 2; }

// Core agents i_k demand all of M and own j'_k; counterparts i'_k demand
// j'_k and own j_k. Each j'_k is additionally fed by a chain of path_len
// agents whose demands form a path. With giant_cycle, agent i_1 also
// demands the first chain item, closing the chain into one huge cycle.
inline Instance gen_thm41(int l, int path_len, bool giant_cycle = false) {
    if (l < 1 || path_len < 1) throw BadParams("gen_thm41 needs l, path_len >= 1");
    std::vector<std::string> items;
    std::vector<std::string> core;
    for (int k = 1; k <= l; ++k) core.push_back("j" + std::to_string(k));
    for (const auto& j : core) items.push_back(j);
    for (int k = 1; k <= l; ++k) items.push_back("jp" + std::to_string(k));
    auto chain_item = [](int k, int t) {
        return "q" + std::to_string(k) + "." + std::to_string(t);
    };
    for (int k = 1; k <= l; ++k)
        for (int t = 1; t <= path_len; ++t) items.push_back(chain_item(k, t));

    std::vector<AgentSpec> agents;
    for (int k = 1; k <= l; ++k) {
        AgentSpec a;
        a.id = "i" + std::to_string(k);
        a.demand = core;
        if (giant_cycle && k == 1) a.demand.push_back(chain_item(1, 1));
        a.supply = {"jp" + std::to_string(k)};
        agents.push_back(std::move(a));
    }
    for (int k = 1; k <= l; ++k)
        agents.push_back({"ip" + std::to_string(k),
                          {"jp" + std::to_string(k)},
                          {"j" + std::to_string(k)}});
    for (int k = 1; k <= l; ++k)
        for (int t = 1; t <= path_len; ++t) {
            AgentSpec a;
            a.id = "c" + std::to_string(k) + "." + std::to_string(t);
            a.supply = {chain_item(k, t)};
            a.demand = {t < path_len ? chain_item(k, t + 1)
                                     : "jp" + std::to_string(k)};
            agents.push_back(std::move(a));
        }
    return make_instance(std::move(items), agents);
}

// Three core agents over items a, b, c plus a path of n-3 agents ending in
// a demand for c. With extra_demand, i_1 also demands the first path item,
// which closes a giant cycle of n-2 exchanges.
inline Instance gen_pareto(int n, bool extra_demand = false) {
    if (n < 4) throw BadParams("gen_pareto needs n >= 4");
    std::vector<std::string> items{"a", "b", "c"};
    auto path_item = [](int t) { return "pp" + std::to_string(t); };
    for (int t = 1; t <= n - 3; ++t) items.push_back(path_item(t));

    std::vector<AgentSpec> agents;
    AgentSpec i1{"i1", {"a", "b"}, {"c"}};
    if (extra_demand) i1.demand.push_back(path_item(1));
    agents.push_back(std::move(i1));
    agents.push_back({"i2", {"b"}, {"a"}});
    agents.push_back({"i3", {"c"}, {"b"}});
    for (int t = 1; t <= n - 3; ++t) {
        AgentSpec p;
        p.id = "p" + std::to_string(t);
        p.supply = {path_item(t)};
        p.demand = {t < n - 3 ? path_item(t + 1) : "c"};
        agents.push_back(std::move(p));
    }
    return make_instance(std::move(items), agents);
}

// d blocks of l agents and items. One giant cycle visits every agent; on
// top of it the agents of blocks 2..d demand the rest of their own block.
// The one-shot static optimum takes the giant cycle (d*l exchanges) and
// gets stuck; the dynamic optimum serves everything, l + (d-1)*l^2.
inline Instance gen_greedy_family(int d, int l) {
    if (d < 2 || l < 2) throw BadParams("gen_greedy_family needs d, l >= 2");
    auto item = [](int k, int y) {
        return "j" + std::to_string(k) + "." + std::to_string(y);
    };
    std::vector<std::string> items;
    for (int y = 1; y <= d; ++y)
        for (int k = 1; k <= l; ++k) items.push_back(item(k, y));

    std::vector<AgentSpec> agents;
    for (int y = 1; y <= d; ++y)
        for (int k = 1; k <= l; ++k) {
            AgentSpec a;
            a.id = "i" + std::to_string(k) + "." + std::to_string(y);
            a.supply = {item(k, y)};
            if (y == 1) {
                a.demand = {item(k, 2)};
            } else {
                for (int t = 1; t <= l; ++t)
                    if (t != k) a.demand.push_back(item(t, y));
                a.demand.push_back(y < d ? item(k, y + 1) : item(k % l + 1, 1));
            }
            agents.push_back(std::move(a));
        }
    return make_instance(std::move(items), agents);
}

// A 3-dimensional matching instance over named element sets.
struct ThreeDMInstance {
    std::vector<std::string> X, Y, Z;
    std::vector<std::tuple<int, int, int>> T;  // indices into X, Y, Z
};

inline void validate_tdm(const ThreeDMInstance& tdm) {
    if (tdm.X.size() != tdm.Y.size() || tdm.Y.size() != tdm.Z.size())
        throw InvalidTDM("element sets must have equal size");
    std::set<std::string> names;
    for (const auto* side : {&tdm.X, &tdm.Y, &tdm.Z})
        for (const auto& e : *side)
            if (!names.insert(e).second)
                throw InvalidTDM("element name reused: " + e);
    std::set<std::tuple<int, int, int>> seen;
    for (auto [x, y, z] : tdm.T) {
        if (x < 0 || x >= static_cast<int>(tdm.X.size()) || y < 0 ||
            y >= static_cast<int>(tdm.Y.size()) || z < 0 ||
            z >= static_cast<int>(tdm.Z.size()))
            throw InvalidTDM("triplet references an undeclared element");
        if (!seen.insert({x, y, z}).second)
            throw InvalidTDM("duplicate triplet");
    }
}

// Maximum number of pairwise-disjoint triplets, by exhaustive branching.
inline int solve_3dm_bruteforce(const ThreeDMInstance& tdm,
                                std::size_t cap = 1'000'000) {
    validate_tdm(tdm);
    const int nt = static_cast<int>(tdm.T.size());
    std::vector<char> xu(tdm.X.size(), 0), yu(tdm.Y.size(), 0), zu(tdm.Z.size(), 0);
    int best = 0;
    std::size_t nodes = 0;
    auto rec = [&](auto&& self, int from, int size) -> void {
        if (++nodes > cap) throw CapExceeded("3DM search cap reached");
        best = std::max(best, size);
        for (int t = from; t < nt; ++t) {
            auto [x, y, z] = tdm.T[t];
            if (xu[x] || yu[y] || zu[z]) continue;
            xu[x] = yu[y] = zu[z] = 1;
            self(self, t + 1, size + 1);
            xu[x] = yu[y] = zu[z] = 0;
        }
    };
    rec(rec, 0, 0);
    return best;
}

// Classification of the demand edges of a reduction instance into the
// eight classes the analysis works with. The classes partition the edges.
struct ReductionLabel {
    std::array<std::vector<std::pair<int, int>>, 8> classes;  // (agent, item)
    std::map<std::pair<int, int>, int> edge_class;
};

// The hardness reduction. Per triplet (x,y,z): agents t_2, t_4, t_6 and
// items t_1, t_3, t_5, t_7 wired so that serving the whole gadget takes
// two cycles, the second of which needs a supply edge that only the first
// one flips. Per y: item y_1 and its owner y_2. Per z: agent z_1 owning
// every t_7 of z's triplets, demanding item z_2. Per x: item x_2 with
// owner x_3, and agent x_1 owning every z_2. The optimum reaches 8n
// exactly when a perfect 3D-matching exists. Multiple x_1 agents own the
// same z_2 items, so for |X| >= 2 the instance is relaxed.
inline std::pair<Instance, ReductionLabel> gen_3dm_reduction(
    const ThreeDMInstance& tdm) {
    validate_tdm(tdm);
    const int nt = static_cast<int>(tdm.T.size());
    auto tname = [](int t, int slot) {
        return "T" + std::to_string(t + 1) + "_" + std::to_string(slot);
    };

    std::vector<std::string> items;
    for (int t = 0; t < nt; ++t)
        for (int slot : {1, 3, 5, 7}) items.push_back(tname(t, slot));
    for (const auto& y : tdm.Y) items.push_back(y + "_1");
    for (const auto& z : tdm.Z) items.push_back(z + "_2");
    for (const auto& x : tdm.X) items.push_back(x + "_2");

    std::vector<AgentSpec> agents;
    for (int t = 0; t < nt; ++t) {
        auto [x, y, z] = tdm.T[t];
        (void)x;
        (void)z;
        agents.push_back({tname(t, 2), {tname(t, 3), tname(t, 7)}, {tname(t, 1)}});
        agents.push_back({tname(t, 4), {tdm.Y[y] + "_1"}, {tname(t, 3)}});
        agents.push_back({tname(t, 6), {tname(t, 7)}, {tname(t, 5)}});
    }
    for (int y = 0; y < static_cast<int>(tdm.Y.size()); ++y) {
        AgentSpec a;
        a.id = tdm.Y[y] + "_2";
        a.supply = {tdm.Y[y] + "_1"};
        for (int t = 0; t < nt; ++t)
            if (std::get<1>(tdm.T[t]) == y) a.demand.push_back(tname(t, 5));
        agents.push_back(std::move(a));
    }
    for (int z = 0; z < static_cast<int>(tdm.Z.size()); ++z) {
        AgentSpec a;
        a.id = tdm.Z[z] + "_1";
        a.demand = {tdm.Z[z] + "_2"};
        for (int t = 0; t < nt; ++t)
            if (std::get<2>(tdm.T[t]) == z) a.supply.push_back(tname(t, 7));
        agents.push_back(std::move(a));
    }
    for (int x = 0; x < static_cast<int>(tdm.X.size()); ++x) {
        AgentSpec a1;
        a1.id = tdm.X[x] + "_1";
        a1.demand = {tdm.X[x] + "_2"};
        for (const auto& z : tdm.Z) a1.supply.push_back(z + "_2");
        agents.push_back(std::move(a1));
        AgentSpec a3;
        a3.id = tdm.X[x] + "_3";
        a3.supply = {tdm.X[x] + "_2"};
        for (int t = 0; t < nt; ++t)
            if (std::get<0>(tdm.T[t]) == x) a3.demand.push_back(tname(t, 1));
        agents.push_back(std::move(a3));
    }

    Instance inst = tdm.X.size() > 1 ? make_relaxed_instance(items, agents)
                                     : make_instance(items, agents);

    ReductionLabel label;
    auto add = [&](int cls, const std::string& agent, const std::string& item) {
        int a = inst.agent_index(agent);
        int j = inst.item_index(item);
        label.classes[cls].emplace_back(a, j);
        label.edge_class[{a, j}] = cls;
    };
    for (int x = 0; x < static_cast<int>(tdm.X.size()); ++x)
        add(0, tdm.X[x] + "_1", tdm.X[x] + "_2");
    for (int t = 0; t < nt; ++t) {
        auto [x, y, z] = tdm.T[t];
        (void)z;
        add(1, tdm.X[x] + "_3", tname(t, 1));
        add(2, tname(t, 2), tname(t, 3));
        add(3, tname(t, 4), tdm.Y[y] + "_1");
        add(4, tdm.Y[y] + "_2", tname(t, 5));
        add(5, tname(t, 6), tname(t, 7));
        add(6, tname(t, 2), tname(t, 7));
    }
    for (int z = 0; z < static_cast<int>(tdm.Z.size()); ++z)
        add(7, tdm.Z[z] + "_1", tdm.Z[z] + "_2");
    return {std::move(inst), std::move(label)};
}

// A supply-demand path: agent a_t owns item j_t and demands j_{t+1}; the
// final agent a_k demands nothing, so closing the only cycle forces an
// undemanded receipt of j_1. With hide_last, a_k's item is withheld and
// item j_k has no owner.
inline Instance gen_utility_path(int k, bool hide_last = false) {
    if (k < 2) throw BadParams("gen_utility_path needs k >= 2");
    std::vector<std::string> items;
    for (int t = 1; t <= k; ++t) items.push_back("j" + std::to_string(t));
    std::vector<AgentSpec> agents;
    for (int t = 1; t <= k; ++t) {
        AgentSpec a;
        a.id = "a" + std::to_string(t);
        if (t < k) a.demand = {"j" + std::to_string(t + 1)};
        if (t < k || !hide_last) a.supply = {"j" + std::to_string(t)};
        agents.push_back(std::move(a));
    }
    return hide_last ? make_relaxed_instance(std::move(items), agents)
                     : make_instance(std::move(items), agents);
}

// Owners round-robin; each agent then demands every item he does not own
// independently with the given density. Same seed, same instance.
inline Instance gen_random(int n_agents, int n_items, double demand_density,
                           std::uint64_t seed) {
    if (n_agents < 1 || n_items < 0 || demand_density < 0.0 || demand_density > 1.0)
        throw BadParams("gen_random: bad parameters");
    const std::uint64_t threshold =
        static_cast<std::uint64_t>(demand_density * 1'000'000.0 + 0.5);
    std::mt19937_64 rng(seed);

    std::vector<std::string> items;
    for (int j = 0; j < n_items; ++j) items.push_back("m" + std::to_string(j + 1));
    std::vector<AgentSpec> agents(n_agents);
    for (int a = 0; a < n_agents; ++a)
        agents[a].id = "a" + std::to_string(a + 1);
    for (int j = 0; j < n_items; ++j)
        agents[j % n_agents].supply.push_back(items[j]);
    for (int a = 0; a < n_agents; ++a)
        for (int j = 0; j < n_items; ++j) {
            if (j % n_agents == a) continue;  // own item, excluded up front
            if (rng() % 1'000'000 < threshold) agents[a].demand.push_back(items[j]);
        }
    return make_instance(std::move(items), agents);
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::json to_json(const Instance& inst) {
    nlohmann::json out;
    out["items"] = inst.item_names;
    out["agents"] = nlohmann::json::array();
    for (int a = 0; a < inst.num_agents(); ++a) {
        nlohmann::json ja;
        ja["id"] = inst.agent_names[a];
        ja["demand"] = nlohmann::json::array();
        for (int j : inst.demand[a]) ja["demand"].push_back(inst.item_names[j]);
        ja["supply"] = nlohmann::json::array();
        for (int j : inst.supply[a]) ja["supply"].push_back(inst.item_names[j]);
        out["agents"].push_back(std::move(ja));
    }
    return out;
}

inline std::string serialize(const Instance& inst) { return to_json(inst).dump(2); }

// Parse the JSON schema; instances violating the ownership partition come
// back with the relaxed flag set. ParseError carries the byte offset for
// syntax errors and the offending path for shape errors.
inline Instance parse_instance(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("JSON syntax error at byte " + std::to_string(e.byte) +
                         ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("items") || !doc.contains("agents"))
        throw ParseError("top level must be an object with items and agents");
    if (!doc["items"].is_array())
        throw ParseError("items: expected an array of item ids");
    std::vector<std::string> items;
    for (std::size_t j = 0; j < doc["items"].size(); ++j) {
        if (!doc["items"][j].is_string())
            throw ParseError("items[" + std::to_string(j) + "]: expected a string");
        items.push_back(doc["items"][j].get<std::string>());
    }
    if (!doc["agents"].is_array())
        throw ParseError("agents: expected an array of agent objects");
    std::vector<AgentSpec> agents;
    for (std::size_t a = 0; a < doc["agents"].size(); ++a) {
        const auto& ja = doc["agents"][a];
        const std::string at = "agents[" + std::to_string(a) + "]";
        if (!ja.is_object() || !ja.contains("id") || !ja["id"].is_string())
            throw ParseError(at + ": expected an object with a string id");
        AgentSpec spec;
        spec.id = ja["id"].get<std::string>();
        for (const char* field : {"demand", "supply"}) {
            if (!ja.contains(field)) continue;
            if (!ja[field].is_array())
                throw ParseError(at + "." + field + ": expected an array");
            auto& dst = field == std::string("demand") ? spec.demand : spec.supply;
            for (std::size_t j = 0; j < ja[field].size(); ++j) {
                if (!ja[field][j].is_string())
                    throw ParseError(at + "." + field + "[" + std::to_string(j) +
                                     "]: expected a string");
                dst.push_back(ja[field][j].get<std::string>());
            }
        }
        agents.push_back(std::move(spec));
    }
    try {
        return make_instance(items, agents);
    } catch (const PartitionViolation&) {
        return make_relaxed_instance(items, agents);
    } catch (const UnknownId& e) {
        throw ParseError(std::string("undeclared item referenced: ") + e.what());
    }
}

// DOT rendering of a trading graph: agents as circles, items as boxes,
// demand edges agent -> item, supply edges item -> agent.
inline std::string export_dot(const Instance& inst, const TradingGraph& g) {
    std::ostringstream out;
    out << "digraph trading {\n";
    for (const auto& a : inst.agent_names)
        out << "  \"" << a << "\" [shape=circle];\n";
    for (const auto& j : inst.item_names)
        out << "  \"" << j << "\" [shape=box];\n";
    for (auto [a, j] : g.demand_edges())
        out << "  \"" << inst.agent_names[a] << "\" -> \"" << inst.item_names[j]
            << "\";\n";
    for (auto [j, a] : g.supply_edges())
        out << "  \"" << inst.item_names[j] << "\" -> \"" << inst.agent_names[a]
            << "\";\n";
    out << "}\n";
    return out.str();
}

inline std::string export_dot(const Instance& inst) {
    return export_dot(inst, initial_graph(inst));
}

}  // namespace barter
