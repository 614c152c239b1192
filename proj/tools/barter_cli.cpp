// Experiment driver: generate benchmark instances, run the solvers, audit
// mechanism properties, measure approximation ratios and export DOT graphs.
// Machine-readable JSON goes to stdout, diagnostics and timings to stderr.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "barter/audit.hpp"
#include "barter/dynamic.hpp"
#include "barter/instances.hpp"
#include "barter/model.hpp"
#include "barter/static_solver.hpp"

namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw barter::ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw barter::Error("cannot write file: " + out_path);
    out << text;
}

barter::Instance load(const std::string& in_path) {
    return barter::parse_instance(slurp(in_path));
}

json cycles_to_json(const barter::Instance& inst,
                    const std::vector<barter::Cycle>& cycles) {
    json out = json::array();
    for (const auto& c : cycles) {
        json jc = json::array();
        for (auto [a, j] : c)
            jc.push_back({inst.agent_names[a], inst.item_names[j]});
        out.push_back(std::move(jc));
    }
    return out;
}

barter::Execution run_algo(const std::string& algo, const barter::Instance& inst,
                           const barter::SearchLimits& limits) {
    if (algo == "static") return barter::solve_static_optimal(inst);
    if (algo == "as") return barter::solve_As(inst);
    if (algo == "greedy") return barter::greedy_dynamic(inst);
    if (algo == "exact") return barter::exact_dynamic_optimal(inst, limits);
    throw barter::BadParams("unknown algorithm: " + algo);
}

struct GenParams {
    std::string family, out_path;
    int l = 2, d = 2, n = 4, agents = 5, items = 5, path_len = 2;
    double density = 0.4;
    std::uint64_t seed = 0;
    bool paper_exact = false;
};

barter::Instance generate(const GenParams& p) {
    if (p.family == "fig1") return barter::gen_fig1();
    if (p.family == "claim32") return barter::gen_claim32(p.l);
    if (p.family == "thm41") {
        int path_len =
            p.paper_exact ? barter::thm41_paper_path_len(p.l) : p.path_len;
        return barter::gen_thm41(p.l, path_len);
    }
    if (p.family == "pareto") return barter::gen_pareto(p.n);
    if (p.family == "greedy") return barter::gen_greedy_family(p.d, p.l);
    if (p.family == "3dm") {
        barter::ThreeDMInstance tdm;
        for (int i = 1; i <= p.n; ++i) {
            tdm.X.push_back("x" + std::to_string(i));
            tdm.Y.push_back("y" + std::to_string(i));
            tdm.Z.push_back("z" + std::to_string(i));
            tdm.T.emplace_back(i - 1, i - 1, i - 1);
        }
        return barter::gen_3dm_reduction(tdm).first;
    }
    if (p.family == "utility-path") return barter::gen_utility_path(p.n);
    if (p.family == "random")
        return barter::gen_random(p.agents, p.items, p.density, p.seed);
    throw barter::BadParams("unknown family: " + p.family);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"barter exchange experiment driver"};
    app.require_subcommand(1);

    GenParams gp;
    auto* gen = app.add_subcommand("gen", "generate an instance as JSON");
    gen->add_option("family", gp.family,
                    "fig1|claim32|thm41|pareto|greedy|3dm|utility-path|random")
        ->required();
    gen->add_option("--l", gp.l, "demand-bound parameter");
    gen->add_option("--d", gp.d, "block count (greedy family)");
    gen->add_option("--n", gp.n, "size parameter (pareto, 3dm, utility-path)");
    gen->add_option("--agents", gp.agents, "agent count (random)");
    gen->add_option("--items", gp.items, "item count (random)");
    gen->add_option("--density", gp.density, "demand density (random)");
    gen->add_option("--seed", gp.seed, "random seed");
    gen->add_option("--path-len", gp.path_len, "feeder path length (thm41)");
    gen->add_flag("--paper-exact", gp.paper_exact,
                  "use the full-length feeder paths (thm41)");
    gen->add_option("--out", gp.out_path, "output file, default stdout");

    std::string in_path, algo = "exact", out_path, dot_out, mechanism = "as";
    std::string agent_id;
    std::size_t max_states = 2'000'000, caps = 1 << 16;
    bool strict = false;

    auto* solve = app.add_subcommand("solve", "run a solver on an instance");
    solve->add_option("--in", in_path, "instance JSON")->required();
    solve->add_option("--algo", algo, "static|as|greedy|exact");
    solve->add_option("--max-states", max_states, "search state budget");
    solve->add_option("--dot-out", dot_out, "prefix for per-step DOT files");
    solve->add_flag("--strict", strict, "nonzero exit when a limit was hit");

    auto* audit = app.add_subcommand("audit", "audit strategyproofness");
    audit->add_option("--in", in_path, "instance JSON")->required();
    audit->add_option("--mechanism", mechanism, "as|static");
    audit->add_option("--agent", agent_id, "audit one agent id, default all");
    audit->add_option("--caps", caps, "misreport enumeration cap");

    auto* ratio = app.add_subcommand("ratio", "exact-vs-algorithm ratio");
    ratio->add_option("--in", in_path, "instance JSON")->required();
    ratio->add_option("--algo", algo, "static|as|greedy|exact");
    ratio->add_option("--max-states", max_states, "search state budget");

    auto* exportdot = app.add_subcommand("export-dot", "write the trading graph");
    exportdot->add_option("--in", in_path, "instance JSON")->required();
    exportdot->add_option("--out", out_path, "output file, default stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        auto t0 = std::chrono::steady_clock::now();
        barter::SearchLimits limits;
        limits.max_states = max_states;
        int exit_code = 0;

        if (gen->parsed()) {
            emit(barter::serialize(generate(gp)), gp.out_path);
        } else if (solve->parsed()) {
            barter::Instance inst = load(in_path);
            barter::Execution ex = run_algo(algo, inst, limits);
            if (!dot_out.empty()) {
                barter::TradingGraph g = barter::initial_graph(inst);
                emit(barter::export_dot(inst, g), dot_out + "_0.dot");
                int step = 1;
                for (const auto& c : ex.cycles) {
                    g = barter::apply_cycle(g, c);
                    emit(barter::export_dot(inst, g),
                         dot_out + "_" + std::to_string(step++) + ".dot");
                }
            }
            json rep;
            rep["digest"] = fnv1a_hex(barter::serialize(inst));
            rep["algorithm"] = algo;
            rep["size"] = ex.size;
            rep["welfare"] = barter::social_welfare(ex);
            rep["optimal"] = ex.optimal;
            rep["cycles"] = cycles_to_json(inst, ex.cycles);
            json utils = json::object();
            for (int a = 0; a < inst.num_agents(); ++a)
                utils[inst.agent_names[a]] = barter::utility(ex, a);
            rep["utilities"] = std::move(utils);
            emit(rep.dump(2), "");
            if (strict && !ex.optimal) {
                std::cerr << "search limit reached, result may be suboptimal\n";
                exit_code = 3;
            }
        } else if (audit->parsed()) {
            barter::Instance inst = load(in_path);
            barter::Mechanism mech =
                mechanism == "as"
                    ? barter::Mechanism(
                          [](const barter::Instance& i) { return barter::solve_As(i); })
                    : barter::Mechanism([](const barter::Instance& i) {
                          return barter::solve_static_optimal(i);
                      });
            json reports = json::array();
            int from = 0, to = inst.num_agents();
            if (!agent_id.empty()) {
                from = inst.agent_index(agent_id);
                to = from + 1;
            }
            for (int a = from; a < to; ++a) {
                auto dev = barter::audit_strategyproofness(mech, inst, a, caps);
                json jd;
                jd["agent"] = inst.agent_names[a];
                jd["truthful_utility"] = dev.truthful_utility;
                jd["best_utility"] = dev.best_utility;
                jd["gain"] = dev.gain;
                jd["misreports_tried"] = dev.misreports_tried;
                json jm;
                jm["demand"] = json::array();
                for (int j : dev.best_misreport.demand)
                    jm["demand"].push_back(inst.item_names[j]);
                jm["supply"] = json::array();
                for (int j : dev.best_misreport.supply)
                    jm["supply"].push_back(inst.item_names[j]);
                jd["best_misreport"] = std::move(jm);
                reports.push_back(std::move(jd));
            }
            json rep;
            rep["digest"] = fnv1a_hex(barter::serialize(inst));
            rep["mechanism"] = mechanism;
            rep["reports"] = std::move(reports);
            emit(rep.dump(2), "");
        } else if (ratio->parsed()) {
            barter::Instance inst = load(in_path);
            barter::Execution opt = barter::exact_dynamic_optimal(inst, limits);
            if (!opt.optimal)
                throw barter::LimitExceeded("dynamic oracle hit its state limit");
            barter::Execution got = run_algo(algo, inst, limits);
            json rep;
            rep["digest"] = fnv1a_hex(barter::serialize(inst));
            rep["algorithm"] = algo;
            rep["exact_size"] = opt.size;
            rep["algorithm_size"] = got.size;
            if (got.size == 0)
                rep["ratio"] = opt.size > 0 ? "inf" : "1/1";
            else
                rep["ratio"] =
                    std::to_string(opt.size) + "/" + std::to_string(got.size);
            emit(rep.dump(2), "");
        } else if (exportdot->parsed()) {
            emit(barter::export_dot(load(in_path)), out_path);
        }

        auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        std::cerr << "done in " << dt.count() << " ms\n";
        return exit_code;
    } catch (const barter::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
