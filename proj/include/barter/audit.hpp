// Mechanism-property auditors: strategyproofness by misreport enumeration,
// tie-breaking utility consistency and approximation-ratio measurement.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barter/dynamic.hpp"
#include "barter/model.hpp"
#include "barter/static_solver.hpp"

namespace barter {

// A mechanism maps the instance induced by the agents' reports to an
// execution on the reported graph.
using Mechanism = std::function<Execution(const Instance&)>;

struct DeviationReport {
    int agent = -1;
    int truthful_utility = 0;
    Report best_misreport;
    int best_utility = 0;
    int gain = 0;  // best_utility - truthful_utility, scored on TRUE sets
    std::size_t misreports_tried = 0;
};

namespace detail {

// Utility scored against the agent's true sets: receiving an item outside
// the true demand set or giving one outside the true supply set voids the
// agent's participation. The penalty is floored at 0, which is enough to
// compare against the nonnegative truthful utility.
inline int true_utility(const Instance& truth, const Execution& ex, int agent) {
    for (int j : ex.received[agent])
        if (!truth.demands(agent, j)) return 0;
    for (int j : ex.given[agent]) {
        if (!truth.owns(agent, j) &&
            std::find(ex.received[agent].begin(), ex.received[agent].end(), j) ==
                ex.received[agent].end())
            return 0;
    }
    return static_cast<int>(ex.received[agent].size());
}

inline std::vector<Report> truthful_reports(const Instance& inst) {
    std::vector<Report> reports(inst.num_agents());
    for (int a = 0; a < inst.num_agents(); ++a)
        reports[a] = {inst.demand[a], inst.supply[a]};
    return reports;
}

inline int run_with_report(const Mechanism& mech, const Instance& truth,
                           std::vector<Report> reports, int agent, Report r) {
    reports[agent] = std::move(r);
    try {
        Execution ex = mech(report_instance(truth, reports));
        return true_utility(truth, ex, agent);
    } catch (const InvalidReports&) {
        return 0;  // rejected report, the agent trades nothing
    }
}

}  // namespace detail

// Exhaustive sweep over one agent's misreports against everyone else's
// truthful reports: every (D' subseteq D_i, S' subseteq S_i) pair plus
// every single-item addition from the universe. gain <= 0 certifies that
// no profitable deviation exists within the swept space.
inline DeviationReport audit_strategyproofness(const Mechanism& mech,
                                               const Instance& inst, int agent,
                                               std::size_t cap = 1 << 16) {
    const auto& d = inst.demand[agent];
    const auto& s = inst.supply[agent];
    if ((std::size_t{1} << (d.size() + s.size())) > cap)
        throw CapExceeded("misreport space larger than the cap");

    DeviationReport rep;
    rep.agent = agent;
    auto reports = detail::truthful_reports(inst);
    rep.truthful_utility =
        detail::run_with_report(mech, inst, reports, agent, reports[agent]);
    rep.best_misreport = reports[agent];
    rep.best_utility = rep.truthful_utility;

    auto consider = [&](const Report& r) {
        ++rep.misreports_tried;
        int u = detail::run_with_report(mech, inst, reports, agent, r);
        if (u > rep.best_utility) {
            rep.best_utility = u;
            rep.best_misreport = r;
        }
    };

    for (std::uint32_t dm = 0; dm < (1u << d.size()); ++dm) {
        Report r;
        for (std::size_t t = 0; t < d.size(); ++t)
            if (dm & (1u << t)) r.demand.push_back(d[t]);
        for (std::uint32_t sm = 0; sm < (1u << s.size()); ++sm) {
            r.supply.clear();
            for (std::size_t t = 0; t < s.size(); ++t)
                if (sm & (1u << t)) r.supply.push_back(s[t]);
            consider(r);
        }
    }
    // single-item additions on top of the truthful report
    for (int j = 0; j < inst.num_items(); ++j) {
        if (!inst.demands(agent, j)) {
            Report r{d, s};
            r.demand.push_back(j);
            std::sort(r.demand.begin(), r.demand.end());
            consider(r);
        }
        if (!inst.owns(agent, j)) {
            Report r{d, s};
            r.supply.push_back(j);
            std::sort(r.supply.begin(), r.supply.end());
            consider(r);
        }
    }

    rep.gain = rep.best_utility - rep.truthful_utility;
    return rep;
}

// True iff every maximum-weight perfect matching of H'(G) gives every
// agent the same received set. `perturbed = false` runs the same check on
// the unperturbed H(G), where it is allowed to fail.
inline bool audit_tie_consistency(const Instance& inst, bool perturbed = true,
                                  std::size_t cap = 500'000) {
    TradingGraph g = initial_graph(inst);
    EdgeGraph eg = perturbed
                       ? build_perturbed_edge_graph(g, PerturbationOrder(g.n, g.m))
                       : build_edge_graph(g);
    auto all = enumerate_perfect_matchings(eg.bip, cap);
    if (all.empty()) return true;
    Weight max_w = all.front().weight;
    for (const auto& m : all)
        if (m.weight > max_w) max_w = m.weight;

    std::optional<std::vector<std::vector<int>>> reference;
    for (const auto& m : all) {
        if (m.weight != max_w) continue;
        Execution ex = matching_to_execution(g, eg, m);
        auto received = ex.received;
        for (auto& v : received) std::sort(v.begin(), v.end());
        if (!reference) {
            reference = std::move(received);
        } else if (received != *reference) {
            return false;
        }
    }
    return true;
}

// exact_dynamic_optimal.size / algorithm.size as an exact rational.
// 0/0 is 1 by convention; x/0 for x > 0 is reported via `infinite`.
struct ApproximationRatio {
    bool infinite = false;
    Rational value{1};
};

inline ApproximationRatio approximation_ratio(
    const Instance& inst, const std::function<Execution(const Instance&)>& algorithm,
    const SearchLimits& limits = {}) {
    Execution opt = exact_dynamic_optimal(inst, limits);
    if (!opt.optimal) throw LimitExceeded("dynamic oracle hit its state limit");
    Execution got = algorithm(inst);
    ApproximationRatio r;
    if (got.size == 0) {
        if (opt.size > 0) r.infinite = true;
        return r;
    }
    r.value = Rational(opt.size, got.size);
    return r;
}

}  // namespace barter
