#include "dcmrank/coupling.hpp"
#include "dcmrank/errors.hpp"
#include "dcmrank/experiment.hpp"
#include "dcmrank/graph.hpp"
#include "dcmrank/io.hpp"
#include "dcmrank/rank.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/wbp.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace dcmrank;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 1;
};

void log_line(const std::string& msg) { std::cerr << "[dcmrank] " << msg << '\n'; }

Json load_config(const Globals& g) {
    if (g.config_path.empty()) return Json::object();
    try {
        return Json::parse(read_file(g.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidParameter("config " + g.config_path + ": " + e.what());
    }
}

//! Rejects keys outside `allowed` and splits off the model keys.
DegreeModelParams model_from(const Json& cfg, const std::set<std::string>& allowed) {
    if (!cfg.is_object()) throw InvalidParameter("config must be a JSON object");
    for (const auto& [key, value] : cfg.items())
        if (!allowed.count(key) && key != "model" && key != "c" && key != "seed" && key != "output_dir")
            throw InvalidParameter("unknown config key '" + key + "'");
    DegreeModelParams p;
    if (cfg.contains("model")) p = params_from_json(cfg.at("model"));
    if (cfg.contains("c")) {
        const double c = cfg.at("c").get<double>();
        p.damping = ScalarLaw::point(c);
        p.personalization = ScalarLaw::point(1.0 - c);
    }
    p.validate();
    return p;
}

std::uint64_t seed_of(const Globals& g, const Json& cfg) {
    if (g.seed) return *g.seed;
    return cfg.value("seed", std::uint64_t{1});
}

fs::path out_of(const Globals& g, const Json& cfg, const char* fallback) {
    if (!g.out.empty()) return g.out;
    return cfg.value("output_dir", std::string(fallback));
}

template <class T>
T key_or(const Json& cfg, const char* key, T fallback, std::optional<T> flag) {
    if (flag) return *flag;
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidParameter(std::string("config key '") + key + "' has the wrong type");
    }
}

std::string to_csv(const ExtendedBiDegreeSequence& seq) {
    std::ostringstream os;
    write_sequence_csv(os, seq);
    return os.str();
}

std::string to_csv(const DirectedMultigraph& graph) {
    std::ostringstream os;
    write_edges_csv(os, graph);
    return os.str();
}

ExtendedBiDegreeSequence load_sequence(const std::string& path) {
    std::istringstream is(read_file(path));
    return read_sequence_csv(is);
}

Json sequence_sidecar(const DegreeModelParams& p, std::uint64_t seed, const IidAlgorithmResult& r) {
    Json j;
    j["params"] = to_json(p);
    j["seed"] = seed;
    j["rounds"] = r.rounds;
    j["imbalance"] = r.imbalance;
    j["n"] = r.sequence.size();
    j["stubs"] = r.sequence.total_stubs();
    return j;
}

struct GenerateOpts {
    std::optional<std::size_t> n;
};

int cmd_generate(const Globals& g, const GenerateOpts& o) {
    const Json cfg = load_config(g);
    const auto params = model_from(cfg, {"n"});
    const auto n = key_or<std::size_t>(cfg, "n", 1000, o.n);
    const auto seed = seed_of(g, cfg);
    const auto out = out_of(g, cfg, "out");
    const DegreeModel model(params);
    RandomStream rng(seed);
    const auto res = run_iid_algorithm(model, n, rng);
    write_file_atomic(out / "sequence.csv", to_csv(res.sequence));
    write_file_atomic(out / "sequence.json", dump_json(sequence_sidecar(params, seed, res)));
    log_line("generate: n=" + std::to_string(n) + " rounds=" + std::to_string(res.rounds) + " -> " + out.string());
    return 0;
}

struct GraphOpts {
    std::string sequence;
    std::optional<std::size_t> n;
};

int cmd_graph(const Globals& g, const GraphOpts& o) {
    const Json cfg = load_config(g);
    const auto params = model_from(cfg, {"n"});
    const auto seed = seed_of(g, cfg);
    const auto out = out_of(g, cfg, "out");
    RandomStream rng(seed);
    ExtendedBiDegreeSequence seq;
    if (!o.sequence.empty()) {
        seq = load_sequence(o.sequence);
    } else {
        const DegreeModel model(params);
        const auto res = run_iid_algorithm(model, key_or<std::size_t>(cfg, "n", 1000, o.n), rng);
        seq = res.sequence;
        write_file_atomic(out / "sequence.json", dump_json(sequence_sidecar(params, seed, res)));
    }
    RandomStream wiring = rng.split(1);
    const auto graph = build_graph(seq, wiring);
    write_file_atomic(out / "sequence.csv", to_csv(seq));
    write_file_atomic(out / "edges.csv", to_csv(graph));
    log_line("graph: n=" + std::to_string(graph.node_count()) + " edges=" + std::to_string(graph.edge_count()));
    return 0;
}

struct RankOpts {
    std::string sequence;
    std::string edges;
    std::string method = "power";
    std::optional<int> iterations;
};

int cmd_rank(const Globals& g, const RankOpts& o) {
    const Json cfg = load_config(g);
    const auto params = model_from(cfg, {"r0", "tolerance", "max_iterations", "damping_bound"});
    const auto out = out_of(g, cfg, "out");
    if (o.sequence.empty() || o.edges.empty()) throw InvalidParameter("rank needs --sequence and --edges");
    auto seq = load_sequence(o.sequence);
    std::istringstream es(read_file(o.edges));
    const auto graph = read_edges_csv(es, std::move(seq));
    RankingConfig rc;
    rc.r0 = cfg.value("r0", 1.0);
    rc.tolerance = cfg.value("tolerance", 1e-10);
    rc.max_k = cfg.value("max_iterations", 1000);
    rc.damping_bound = cfg.value("damping_bound", params.damping_bound());
    const auto& q = graph.attributes.personalization;
    RankVector r;
    if (o.method == "power") r = power_iteration(graph, q, rc);
    else if (o.method == "fixed") r = fixed_iterations(graph, q, rc.r0, o.iterations.value_or(10), rc.damping_bound);
    else if (o.method == "exact") r = solve_exact(graph, q);
    else throw InvalidParameter("unknown rank method '" + o.method + "'");
    std::ostringstream os;
    write_rank_csv(os, r.values);
    write_file_atomic(out / "ranks.csv", os.str());
    Json meta;
    meta["method"] = o.method;
    meta["iterations"] = r.iterations;
    meta["certified_error_bound"] = r.certified_error_bound;
    meta["last_step_l2"] = r.last_step_l2;
    meta["residual_l1"] = r.residual_l1;
    write_file_atomic(out / "rank.json", dump_json(meta));
    log_line("rank: " + o.method + " iterations=" + std::to_string(r.iterations));
    return 0;
}

struct CoupleOpts {
    std::optional<std::size_t> n;
    std::optional<int> depth;
};

int cmd_couple(const Globals& g, const CoupleOpts& o) {
    const Json cfg = load_config(g);
    const auto params = model_from(cfg, {"n", "depth"});
    const auto n = key_or<std::size_t>(cfg, "n", 1000, o.n);
    const int depth = key_or<int>(cfg, "depth", 3, o.depth);
    if (depth < 0) throw InvalidParameter("depth must be >= 0");
    const auto seed = seed_of(g, cfg);
    const auto out = out_of(g, cfg, "out");
    const DegreeModel model(params);
    RandomStream rng(seed);
    const auto res = run_iid_algorithm(model, n, rng);
    const auto coupled = build_coupled(res.sequence, depth, rng);
    std::ostringstream tree;
    write_tree_csv(tree, coupled.tree);
    write_file_atomic(out / "sequence.csv", to_csv(res.sequence));
    write_file_atomic(out / "sequence.json", dump_json(sequence_sidecar(params, seed, res)));
    write_file_atomic(out / "edges.csv", to_csv(coupled.graph));
    write_file_atomic(out / "tree.csv", tree.str());
    Json meta;
    meta["first_node"] = coupled.first_node;
    meta["depth"] = depth;
    meta["tau"] = coupled.tau.generation;
    meta["broken"] = coupled.tau.broken;
    meta["tree_nodes"] = coupled.tree.size();
    write_file_atomic(out / "coupling.json", dump_json(meta));
    log_line("couple: first node " + std::to_string(coupled.first_node) + " tau=" + std::to_string(coupled.tau.generation));
    return 0;
}

struct WbpOpts {
    std::optional<std::size_t> samples;
    std::optional<int> generations;
    bool endogenous = false;
    std::string sequence;
};

int cmd_wbp(const Globals& g, const WbpOpts& o) {
    const Json cfg = load_config(g);
    const auto params = model_from(cfg, {"samples", "generations", "r_leaf", "max_wbp_nodes"});
    const auto samples = key_or<std::size_t>(cfg, "samples", 1000, o.samples);
    const int k = key_or<int>(cfg, "generations", 10, o.generations);
    const double r_leaf = cfg.value("r_leaf", 0.0);
    const auto cap = cfg.value("max_wbp_nodes", kDefaultPopulationCap);
    const auto seed = seed_of(g, cfg);
    const auto out = out_of(g, cfg, "out");
    std::optional<DegreeModel> model;
    LimitLaws laws;
    if (o.sequence.empty()) {
        model.emplace(params);
        laws = analytic_limit_laws(*model);
    } else {
        laws = empirical_branching_laws(load_sequence(o.sequence));
    }
    const RandomStream base(seed);
    std::vector<double> values(samples);
    std::vector<char> ok(samples, 0);
    parallel_for(samples, g.threads, [&](std::size_t i) {
        RandomStream rng = base.split(i);
        try {
            values[i] = o.endogenous ? sample_endogenous(*laws.branching, k, r_leaf, rng, cap)
                                     : sample_r_star(laws, k, rng, r_leaf, cap);
            ok[i] = 1;
        } catch (const PopulationCapExceeded&) {
        }
    });
    std::vector<double> kept;
    for (std::size_t i = 0; i < samples; ++i)
        if (ok[i]) kept.push_back(values[i]);
    std::ostringstream os;
    write_column_csv(os, o.endogenous ? "R" : "R_star", kept);
    write_file_atomic(out / "samples.csv", os.str());
    Json meta;
    meta["law"] = laws.branching->describe();
    meta["root_law"] = laws.root->describe();
    meta["kind"] = o.endogenous ? "endogenous" : "r_star";
    meta["generations"] = k;
    meta["r_leaf"] = r_leaf;
    meta["seed"] = seed;
    meta["aborted"] = samples - kept.size();
    meta["truncation_bound"] = truncation_bound(*laws.branching, k, r_leaf);
    write_file_atomic(out / "samples.json", dump_json(meta));
    log_line("wbp: " + std::to_string(kept.size()) + " samples");
    return 0;
}

int cmd_experiment(const Globals& g, bool reuse_graph) {
    Json cfg = load_config(g);
    if (g.seed) cfg["seed"] = *g.seed;
    if (!g.out.empty()) cfg["output_dir"] = g.out;
    if (reuse_graph) cfg["reuse_graph"] = true;
    cfg["threads"] = g.threads;
    const auto config = ExperimentConfig::from_json(cfg);
    const auto report = run_experiment(config, log_line);
    write_experiment_outputs(report, config.output_dir);
    log_line("experiment: wrote " + config.output_dir);
    return 0;
}

int cmd_tailcheck(const Globals& g) {
    Json cfg = load_config(g);
    if (g.seed) cfg["seed"] = *g.seed;
    if (!g.out.empty()) cfg["output_dir"] = g.out;
    cfg["threads"] = g.threads;
    const auto config = TailcheckConfig::from_json(cfg);
    const auto report = run_tailcheck(config);
    const fs::path out = config.output_dir;
    std::ostringstream os;
    write_column_csv(os, "R_star", report.samples);
    write_file_atomic(out / "tail_samples.csv", os.str());
    write_file_atomic(out / "tail_report.json", dump_json(tailcheck_summary(report, config)));
    log_line("tailcheck: hill index " + format_double(report.hill_index));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directed configuration model PageRank simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.fallthrough();

    GenerateOpts gen;
    auto* generate = app.add_subcommand("generate", "sample a balanced extended bi-degree sequence");
    generate->add_option("--n", gen.n, "number of nodes");

    GraphOpts graph;
    auto* graph_cmd = app.add_subcommand("graph", "wire a configuration-model graph");
    graph_cmd->add_option("--sequence", graph.sequence, "sequence CSV (generated when absent)");
    graph_cmd->add_option("--n", graph.n, "number of nodes when generating");

    RankOpts rank;
    auto* rank_cmd = app.add_subcommand("rank", "compute generalized PageRank");
    rank_cmd->add_option("--sequence", rank.sequence, "sequence CSV")->required();
    rank_cmd->add_option("--edges", rank.edges, "edge CSV")->required();
    rank_cmd->add_option("--method", rank.method, "power | fixed | exact");
    rank_cmd->add_option("--iterations", rank.iterations, "iteration count for --method fixed");

    CoupleOpts couple;
    auto* couple_cmd = app.add_subcommand("couple", "build a graph together with its coupled tree");
    couple_cmd->add_option("--n", couple.n, "number of nodes");
    couple_cmd->add_option("--depth", couple.depth, "tree generations");

    WbpOpts wbp;
    auto* wbp_cmd = app.add_subcommand("wbp", "sample the limit of the root rank");
    wbp_cmd->add_option("--samples", wbp.samples, "number of draws");
    wbp_cmd->add_option("--generations", wbp.generations, "simulated generations");
    wbp_cmd->add_flag("--endogenous", wbp.endogenous, "draw R instead of R*");
    wbp_cmd->add_option("--sequence", wbp.sequence, "use the empirical laws of a sequence CSV");

    bool reuse_graph = false;
    auto* experiment = app.add_subcommand("experiment", "finite-graph ranks against the limit law");
    experiment->add_flag("--reuse-graph", reuse_graph, "one graph per size instead of one per replication");

    auto* tailcheck = app.add_subcommand("tailcheck", "tail index and tail-ratio check of R*");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*generate) return cmd_generate(g, gen);
        if (*graph_cmd) return cmd_graph(g, graph);
        if (*rank_cmd) return cmd_rank(g, rank);
        if (*couple_cmd) return cmd_couple(g, couple);
        if (*wbp_cmd) return cmd_wbp(g, wbp);
        if (*experiment) return cmd_experiment(g, reuse_graph);
        if (*tailcheck) return cmd_tailcheck(g);
    } catch (const FailureBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
