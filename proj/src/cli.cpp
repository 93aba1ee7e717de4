#include "sforest/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "sforest/errors.hpp"
#include "sforest/exact_oracle.hpp"
#include "sforest/gw_forest.hpp"
#include "sforest/instance_gen.hpp"
#include "sforest/pc_clustering.hpp"
#include "sforest/sp_exact.hpp"
#include "sforest/tw_ptas.hpp"

namespace sforest {

namespace {

Json one_based(const std::vector<EdgeId>& edges) {
    Json a = Json::array();
    for (EdgeId e : edges) a.push_back(e + 1);
    return a;
}

std::vector<EdgeId> normalized(std::vector<EdgeId> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

Length edge_sum(const WeightedGraph& g, const std::vector<EdgeId>& edges) {
    Length c = 0;
    for (EdgeId e : edges) c += g.edge(e).length;
    return c;
}

// Reads a list of 1-based edge ids; records problems instead of throwing.
std::vector<EdgeId> read_edge_list(const Json& a, int m, const std::string& what, std::vector<std::string>& problems) {
    std::vector<EdgeId> out;
    if (!a.is_array()) {
        problems.push_back(what + " is not an array");
        return out;
    }
    for (const auto& x : a) {
        if (!x.is_number_integer()) {
            problems.push_back(what + " holds a non-integer entry");
            continue;
        }
        long long id = x.get<long long>();
        if (id < 1 || id > m) {
            problems.push_back(what + " holds unknown edge id " + std::to_string(id));
            continue;
        }
        out.push_back(static_cast<EdgeId>(id - 1));
    }
    return out;
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"gw", "pc-cluster", "sp", "tw-ptas", "pipeline", "oracle"};
    return names;
}

Json solve_envelope(const InstanceFile& inst, const SolveRequest& req) {
    const WeightedGraph& g = inst.graph;
    const DemandSet& d = inst.demands;
    if (req.eps <= 0) throw InvalidInput("eps must be positive");
    if (req.k < 1) throw InvalidInput("k must be at least 1");
    std::vector<EdgeId> all(static_cast<std::size_t>(g.num_edges()));
    std::iota(all.begin(), all.end(), 0);
    if (!is_feasible(g, d, all)) throw Infeasible("some demand pair lies in different components");

    auto t0 = std::chrono::steady_clock::now();
    std::vector<EdgeId> edges;
    Json counters = Json::object();
    Json checks = Json::array({"edge_ids", "feasibility", "cost_recomputed", "instance_hash"});
    Json extra = Json::object();
    const std::string& alg = req.algorithm;
    if (alg == "gw") {
        GwResult r = gw_steiner_forest(g, d);
        edges = r.forest.edges();
        counters["growth_events"] = r.growth_events;
        counters["tree_components"] = r.tree_components.size();
    } else if (alg == "pc-cluster") {
        ClusteringResult r = pc_clustering(g, d, req.eps);
        for (const auto& t : r.trees) edges.insert(edges.end(), t.begin(), t.end());
        DualReport rep = verify_dual(r.contracted.graph, r.dual, true);
        if (!rep.feasible || !rep.tight)
            throw SelfCheckFailed("dual check failed: " + (rep.violations.empty() ? std::string("?") : rep.violations[0]));
        Rational phi_sum = 0;
        for (const auto& p : r.dual.phi) phi_sum += p;
        Length f2 = edge_sum(r.contracted.graph, r.f2);
        if (to_rational(f2) > 2 * phi_sum) throw SelfCheckFailed("pruned forest exceeds twice the potential sum");
        checks.push_back("dual_feasible");
        checks.push_back("dual_tight");
        checks.push_back("pruned_forest_bound");
        Json trees = Json::array();
        for (const auto& t : r.trees) trees.push_back(one_based(normalized(t)));
        extra["trees"] = trees;
        extra["dual"] = {{"feasible", rep.feasible},
                         {"tight", rep.tight},
                         {"violations", rep.violations},
                         {"phi_sum", to_string(phi_sum)},
                         {"pruned_forest_cost", f2}};
        counters["trace_events"] = r.trace.size();
        counters["clusters"] = r.dual.clusters.size();
        counters["tight_set"] = r.tight_set.size();
        counters["flat_sum_disagreements"] = r.flat_sum_disagreements;
        counters["seed_cost"] = r.seed_cost;
    } else if (alg == "sp") {
        SpSolveResult r = inst.sp ? sp_solve_with_tree(g, *inst.sp, d) : sp_solve(g, d);
        edges = r.edges;
        checks.push_back("sp_tree_valid");
        counters["solves"] = r.solves;
        counters["tree_nodes"] = r.tree.nodes.size();
        counters["tree_given"] = inst.sp.has_value();
    } else if (alg == "tw-ptas" || alg == "pipeline") {
        if (inst.td) {
            TdValidation v = validate(g, *inst.td);
            if (!v.valid()) throw InvalidInput("decomposition rejected: " + v.message);
            checks.push_back("decomposition_valid");
        }
        auto put_inner = [&](const PtasResult& r) {
            counters["width"] = r.width;
            counters["internal_eps"] = to_string(r.internal_eps);
            counters["states"] = r.stats.states;
            counters["generated"] = r.stats.generated;
            counters["pruned_by_collection"] = r.stats.pruned_by_collection;
            counters["max_node_states"] = r.stats.max_node_states;
            counters["partitions"] = r.partitions;
        };
        if (alg == "tw-ptas") {
            PtasResult r = tw_ptas(g, d, req.eps, inst.td);
            edges = r.edges;
            put_inner(r);
        } else {
            PipelineResult r = psf_pipeline(g, d, req.eps, req.k);
            edges = r.edges;
            counters["chosen_class"] = r.chosen_class;
            counters["chosen_class_length"] = r.chosen_class_length;
            counters["contracted_width"] = r.contracted_width;
            put_inner(r.inner);
        }
    } else if (alg == "oracle") {
        ExactResult r = opt_forest(g, d);
        edges = r.edges;
        counters["terminals"] = d.terminals().size();
    } else {
        throw InvalidInput("unknown algorithm '" + alg + "'");
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    edges = normalized(edges);
    Json env = Json::object();
    env["instance"] = {{"hash", instance_hash(inst)},
                       {"nodes", g.num_vertices()},
                       {"edges", g.num_edges()},
                       {"demands", d.size()}};
    env["algorithm"] = alg;
    env["parameters"] = {{"eps", to_string(req.eps)}, {"k", req.k}};
    env["cost"] = edge_sum(g, edges);
    env["edges"] = one_based(edges);
    env["feasible"] = is_feasible(g, d, edges);
    env["checks"] = checks;
    env["runtime_ms"] = ms;
    env["counters"] = counters;
    for (auto& [key, value] : extra.items()) env[key] = value;

    auto problems = check_envelope(inst, env);
    if (!problems.empty()) {
        std::string msg = "envelope self-check failed:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw SelfCheckFailed(msg);
    }
    return env;
}

std::vector<std::string> check_envelope(const InstanceFile& inst, const Json& env) {
    std::vector<std::string> problems;
    if (!env.is_object()) return {"envelope is not an object"};
    for (const char* key : {"instance", "algorithm", "parameters", "cost", "edges", "feasible", "checks", "runtime_ms",
                            "counters"})
        if (!env.contains(key)) problems.push_back(std::string("missing field '") + key + "'");
    if (!problems.empty()) return problems;

    const WeightedGraph& g = inst.graph;
    const Json& id = env["instance"];
    if (!id.is_object() || !id.contains("hash") || !id["hash"].is_string())
        problems.push_back("instance hash missing");
    else if (id["hash"].get<std::string>() != instance_hash(inst))
        problems.push_back("instance hash does not match the instance");
    if (!env["algorithm"].is_string() ||
        std::find(algorithm_names().begin(), algorithm_names().end(), env["algorithm"].get<std::string>()) ==
            algorithm_names().end())
        problems.push_back("unknown algorithm name");
    if (!env["checks"].is_array()) problems.push_back("checks is not an array");
    if (!env["runtime_ms"].is_number()) problems.push_back("runtime_ms is not a number");
    if (!env["counters"].is_object()) problems.push_back("counters is not an object");

    std::vector<EdgeId> edges = read_edge_list(env["edges"], g.num_edges(), "edges", problems);
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i] <= edges[i - 1]) {
            problems.push_back("edges are not strictly increasing");
            break;
        }
    edges = normalized(edges);
    bool feasible = is_feasible(g, inst.demands, edges);
    if (!env["feasible"].is_boolean() || env["feasible"].get<bool>() != feasible)
        problems.push_back("feasibility flag disagrees with recomputation");
    if (!feasible) problems.push_back("edge set does not connect every demand pair");
    if (!env["cost"].is_number_integer() || env["cost"].get<long long>() != edge_sum(g, edges))
        problems.push_back("cost disagrees with the edge-length sum");

    if (env.contains("trees")) {
        std::vector<EdgeId> joined;
        if (!env["trees"].is_array()) {
            problems.push_back("trees is not an array");
        } else {
            for (const auto& t : env["trees"]) {
                auto te = normalized(read_edge_list(t, g.num_edges(), "tree", problems));
                if (tree_components_of(g, te).size() > 1) problems.push_back("a tree is disconnected");
                joined.insert(joined.end(), te.begin(), te.end());
            }
            if (normalized(joined) != edges) problems.push_back("trees do not cover exactly the edge list");
        }
    }
    if (env.contains("dual")) {
        const Json& dual = env["dual"];
        if (!dual.is_object() || !dual.value("feasible", false) || !dual.value("tight", false))
            problems.push_back("dual report is not feasible and tight");
        else if (!dual.contains("violations") || !dual["violations"].is_array() || !dual["violations"].empty())
            problems.push_back("dual report lists violations");
    }
    return problems;
}

std::string growth_trace_ndjson(const InstanceFile& inst, const Rational& eps) {
    ClusteringResult r = pc_clustering(inst.graph, inst.demands, eps);
    std::ostringstream os;
    for (const auto& ev : r.trace) {
        Json line = Json::object();
        line["t"] = to_string(ev.time);
        line["kind"] = event_kind_name(ev.kind);
        Json args = Json::array();
        for (long a : ev.args) args.push_back(a + 1);
        line["args"] = args;
        os << line.dump() << "\n";
    }
    return os.str();
}

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        write_file(path, text);
}

std::string rejection_witness(const NotSeriesParallel& e) {
    std::ostringstream os;
    os << "rejected: " << e.what() << "\ncore vertices:";
    for (Vertex v : e.core_vertices) os << ' ' << v + 1;
    os << "\ncore edges:";
    for (auto [a, b] : e.core_edges) os << ' ' << a + 1 << '-' << b + 1;
    os << "\n";
    return os.str();
}

struct BenchLine {
    std::string text;
    bool self_check_failed = false;
};

BenchLine bench_one(const std::string& file, const InstanceFile& inst, const SolveRequest& req) {
    Json line = Json::object();
    line["file"] = file;
    BenchLine out;
    try {
        Json env = solve_envelope(inst, req);
        // Independent re-verification of what is about to be written.
        if (!check_envelope(inst, env).empty()) throw SelfCheckFailed("re-verification failed");
        line["status"] = "ok";
        for (auto& [key, value] : env.items()) line[key] = value;
    } catch (const SelfCheckFailed& e) {
        line["status"] = "self_check_failed";
        line["message"] = e.what();
        out.self_check_failed = true;
    } catch (const Infeasible& e) {
        line["status"] = "infeasible";
        line["message"] = e.what();
    } catch (const NotSeriesParallel& e) {
        line["status"] = "rejected";
        line["message"] = e.what();
    } catch (const LimitExceeded& e) {
        line["status"] = "limit";
        line["message"] = e.what();
    } catch (const std::exception& e) {
        line["status"] = "error";
        line["message"] = e.what();
    }
    if (!line.contains("algorithm")) line["algorithm"] = req.algorithm;
    out.text = line.dump();
    return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steiner forest solvers and tools", "sforest"};
    app.require_subcommand(1);

    std::string in_path, out_path, eps_text = "1", alg, solution_path, suite_dir, json_path;
    int k = 3;
    std::vector<std::string> algs;

    auto* solve = app.add_subcommand("solve", "Solve an instance and write a result envelope");
    solve->add_option("--alg", alg, "Algorithm")->required()->check(CLI::IsMember(algorithm_names()));
    solve->add_option("--eps", eps_text, "Accuracy parameter, e.g. 1/2");
    solve->add_option("--k", k, "Layer count for the pipeline");
    solve->add_option("--in", in_path, "Instance file")->required();
    solve->add_option("--out", out_path, "Envelope file (default: stdout)");

    auto* verify = app.add_subcommand("verify", "Re-verify an envelope against an instance");
    verify->add_option("--in", in_path, "Instance file")->required();
    verify->add_option("--solution", solution_path, "Envelope file")->required();

    auto* bench = app.add_subcommand("bench", "Run algorithms over a directory of instances");
    bench->add_option("--suite", suite_dir, "Directory of instance files")->required();
    bench->add_option("--json", json_path, "NDJSON output file")->required();
    bench->add_option("--algs", algs, "Comma-separated algorithms")->delimiter(',')->check(CLI::IsMember(algorithm_names()));
    bench->add_option("--eps", eps_text, "Accuracy parameter");
    bench->add_option("--k", k, "Layer count for the pipeline");

    auto* trace = app.add_subcommand("trace", "Export the growth-phase event stream as NDJSON");
    trace->add_option("--in", in_path, "Instance file")->required();
    trace->add_option("--eps", eps_text, "Accuracy parameter");
    trace->add_option("--out", out_path, "NDJSON file (default: stdout)");

    auto* gen = app.add_subcommand("gen", "Generate an instance");
    gen->require_subcommand(1);
    std::uint64_t seed = 1;
    int n = 10, m = 14, w = 4, h = 4, ops = 8, demands = 3, vars = 4, clauses = 3, width = 3;
    Length max_len = 100;
    auto* gen_sp = gen->add_subcommand("sp", "Random series-parallel graph with its decomposition tree");
    gen_sp->add_option("--ops", ops, "Number of edges");
    gen_sp->add_option("--demands", demands, "Demand pairs (negative: random count)");
    auto* gen_grid = gen->add_subcommand("grid", "Grid graph");
    gen_grid->add_option("--width", w);
    gen_grid->add_option("--height", h);
    gen_grid->add_option("--demands", demands);
    gen_grid->add_option("--max-len", max_len);
    auto* gen_random = gen->add_subcommand("random", "Random connected graph");
    gen_random->add_option("--n", n);
    gen_random->add_option("--m", m);
    gen_random->add_option("--demands", demands);
    gen_random->add_option("--max-len", max_len);
    auto* gen_hard = gen->add_subcommand("hardness", "Reduction instance of a random formula");
    gen_hard->add_option("--vars", vars, "Maximum number of variables");
    gen_hard->add_option("--clauses", clauses);
    auto* gen_ktree = gen->add_subcommand("ktree", "Partial k-tree with its decomposition");
    gen_ktree->add_option("--n", n);
    gen_ktree->add_option("--k", width, "Treewidth bound");
    gen_ktree->add_option("--demands", demands);
    gen_ktree->add_option("--max-len", max_len);
    for (auto* sub : {gen_sp, gen_grid, gen_random, gen_hard, gen_ktree}) {
        sub->add_option("--seed", seed, "PRNG seed");
        sub->add_option("--out", out_path, "Instance file (default: stdout)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    auto load = [&](const std::string& path) { return parse_instance(read_file(path)); };
    try {
        if (solve->parsed()) {
            InstanceFile inst = load(in_path);
            Json env = solve_envelope(inst, {alg, parse_rational(eps_text), k});
            emit(out_path, env.dump(2) + "\n", out);
            return kExitOk;
        }
        if (verify->parsed()) {
            InstanceFile inst = load(in_path);
            Json env;
            try {
                env = Json::parse(read_file(solution_path));
            } catch (const Json::parse_error& e) {
                err << "error: " << solution_path << ": " << e.what() << "\n";
                return kExitUsage;
            }
            auto problems = check_envelope(inst, env);
            if (problems.empty()) {
                out << "ok\n";
                return kExitOk;
            }
            for (const auto& p : problems) err << "problem: " << p << "\n";
            return kExitInfeasible;
        }
        if (trace->parsed()) {
            InstanceFile inst = load(in_path);
            emit(out_path, growth_trace_ndjson(inst, parse_rational(eps_text)), out);
            return kExitOk;
        }
        if (bench->parsed()) {
            if (algs.empty()) algs = algorithm_names();
            const Rational eps = parse_rational(eps_text);
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(suite_dir))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            std::vector<InstanceFile> insts;
            for (const auto& f : files) {
                try {
                    insts.push_back(load(f.string()));
                } catch (const ParseError& e) {
                    err << "error: " << f.string() << ": " << e.what() << "\n";
                    return kExitUsage;
                }
            }
            const long tasks = static_cast<long>(files.size() * algs.size());
            std::vector<BenchLine> lines(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic)
            for (long i = 0; i < tasks; ++i) {
                std::size_t fi = static_cast<std::size_t>(i) / algs.size(), ai = static_cast<std::size_t>(i) % algs.size();
                lines[static_cast<std::size_t>(i)] =
                    bench_one(files[fi].filename().string(), insts[fi], {algs[ai], eps, k});
            }
            std::string text;
            int failed = 0;
            for (const auto& l : lines) {
                text += l.text + "\n";
                failed += l.self_check_failed;
            }
            write_file(json_path, text);
            out << "bench: " << files.size() << " instances, " << tasks << " runs, " << failed
                << " self-check failures\n";
            return failed ? kExitSelfCheck : kExitOk;
        }
        if (gen->parsed()) {
            std::string text;
            if (gen_sp->parsed()) {
                SpInstance s = gen_random_sp(ops, seed, demands);
                text = render_instance({s.graph, s.demands, std::nullopt, s.tree});
            } else if (gen_grid->parsed()) {
                GeneratedInstance s = sforest::gen_grid(w, h, demands, seed, max_len);
                text = render_instance({s.graph, s.demands, std::nullopt, std::nullopt});
            } else if (gen_random->parsed()) {
                GeneratedInstance s = sforest::gen_random(n, m, demands, seed, max_len);
                text = render_instance({s.graph, s.demands, std::nullopt, std::nullopt});
            } else if (gen_hard->parsed()) {
                RFormula f = random_rformula(vars, clauses, seed);
                HardnessInstance s = gen_hardness(f);
                text = "# threshold " + std::to_string(s.threshold) + "\n" +
                       render_instance({s.graph, s.demands, s.td, std::nullopt});
            } else {
                KTreeInstance s = gen_partial_ktree(n, width, demands, seed, max_len);
                text = render_instance({s.graph, s.demands, s.td, std::nullopt});
            }
            emit(out_path, text, out);
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Infeasible& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const NotSeriesParallel& e) {
        err << rejection_witness(e);
        return kExitInfeasible;
    } catch (const LimitExceeded& e) {
        err << "limit exceeded: " << e.what() << "\n";
        return kExitLimit;
    } catch (const SelfCheckFailed& e) {
        err << "self-check failed: " << e.what() << "\n";
        return kExitSelfCheck;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace sforest
