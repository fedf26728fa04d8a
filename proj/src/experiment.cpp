#include "dcmrank/experiment.hpp"

#include "dcmrank/coupling.hpp"
#include "dcmrank/errors.hpp"
#include "dcmrank/rank.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace dcmrank {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

template <class T>
T get_as(const Json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidParameter("config key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const Json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        throw InvalidParameter("config key '" + key + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

void apply_model_keys(const Json& j, DegreeModelParams& model) {
    if (j.contains("model")) model = params_from_json(j.at("model"));
    if (j.contains("c")) {
        const double c = get_as<double>(j.at("c"), "c");
        model.damping = ScalarLaw::point(c);
        model.personalization = ScalarLaw::point(1.0 - c);
    }
}

std::string failure_text(std::size_t replication, const char* what) {
    return "replication " + std::to_string(replication) + ": " + what;
}

} // namespace

void ExperimentConfig::validate() const {
    model.validate();
    if (n_values.empty()) throw InvalidParameter("n_values must not be empty");
    for (std::size_t n : n_values)
        if (n < 1) throw InvalidParameter("every graph size must be >= 1");
    if (replications < 2) throw InvalidParameter("replications must be >= 2");
    if (wbp_generations < 0) throw InvalidParameter("wbp_generations must be >= 0");
    if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (max_iterations < 1) throw InvalidParameter("max_iterations must be >= 1");
    if (!(failure_budget >= 0.0 && failure_budget <= 1.0)) throw InvalidParameter("failure_budget must lie in [0, 1]");
    if (ecdf_points < 2) throw InvalidParameter("ecdf_points must be >= 2");
    if (!(model.damping_bound() < 1.0)) throw InvalidParameter("damping bound must be below 1");
}

int ExperimentConfig::tbt_depth_for(std::size_t n) const {
    if (tbt_depth >= 0) return tbt_depth;
    return static_cast<int>(std::floor(std::log(static_cast<double>(n))));
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    if (!j.is_object()) throw InvalidParameter("experiment config must be a JSON object");
    static const std::set<std::string> known{
        "model", "c", "n_values", "replications", "wbp_generations", "tbt_depth", "r0", "tolerance",
        "max_iterations", "seed", "output_dir", "reuse_graph", "failure_budget", "ecdf_points",
        "max_wbp_nodes", "threads"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw InvalidParameter("unknown experiment key '" + key + "'");
    ExperimentConfig cfg;
    apply_model_keys(j, cfg.model);
    if (j.contains("n_values")) {
        cfg.n_values.clear();
        for (const auto& v : j.at("n_values")) cfg.n_values.push_back(get_count(v, "n_values"));
    }
    if (j.contains("replications")) cfg.replications = get_count(j.at("replications"), "replications");
    if (j.contains("wbp_generations")) cfg.wbp_generations = get_as<int>(j.at("wbp_generations"), "wbp_generations");
    if (j.contains("tbt_depth")) cfg.tbt_depth = get_as<int>(j.at("tbt_depth"), "tbt_depth");
    if (j.contains("r0")) cfg.r0 = get_as<double>(j.at("r0"), "r0");
    if (j.contains("tolerance")) cfg.tolerance = get_as<double>(j.at("tolerance"), "tolerance");
    if (j.contains("max_iterations")) cfg.max_iterations = get_as<int>(j.at("max_iterations"), "max_iterations");
    if (j.contains("seed")) cfg.master_seed = get_as<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("output_dir")) cfg.output_dir = get_as<std::string>(j.at("output_dir"), "output_dir");
    if (j.contains("reuse_graph")) cfg.reuse_graph = get_as<bool>(j.at("reuse_graph"), "reuse_graph");
    if (j.contains("failure_budget")) cfg.failure_budget = get_as<double>(j.at("failure_budget"), "failure_budget");
    if (j.contains("ecdf_points")) cfg.ecdf_points = get_count(j.at("ecdf_points"), "ecdf_points");
    if (j.contains("max_wbp_nodes")) cfg.max_wbp_nodes = get_count(j.at("max_wbp_nodes"), "max_wbp_nodes");
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(j.at("threads"), "threads"));
    cfg.validate();
    return cfg;
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["model"] = dcmrank::to_json(model);
    j["n_values"] = n_values;
    j["replications"] = replications;
    j["wbp_generations"] = wbp_generations;
    j["tbt_depth"] = tbt_depth;
    j["r0"] = r0;
    j["tolerance"] = tolerance;
    j["max_iterations"] = max_iterations;
    j["seed"] = master_seed;
    j["reuse_graph"] = reuse_graph;
    j["failure_budget"] = failure_budget;
    j["ecdf_points"] = ecdf_points;
    j["max_wbp_nodes"] = max_wbp_nodes;
    return j;
}

namespace {

struct Slot {
    bool ok = false;
    double converged = 0.0, truncated = 0.0, tree = 0.0, limit = 0.0;
    int tau = 0;
    int iterations = 0;
    std::string error;
};

RankVector converged_ranks(const DirectedMultigraph& graph, const ExperimentConfig& cfg) {
    RankingConfig rc;
    rc.r0 = cfg.r0;
    rc.max_k = cfg.max_iterations;
    rc.tolerance = cfg.tolerance;
    rc.damping_bound = cfg.model.damping_bound();
    auto ranks = power_iteration(graph, graph.attributes.personalization, rc);
    if (!(ranks.last_step_l2 < cfg.tolerance))
        throw CertificationError("power iteration did not reach the tolerance within max_iterations");
    return ranks;
}

SizeResult run_size(const ExperimentConfig& cfg, const DegreeModel& model, const LimitLaws& laws,
                    std::size_t size_index, const Logger& log) {
    const std::size_t n = cfg.n_values[size_index];
    const int depth = cfg.tbt_depth_for(n);
    const RandomStream base = RandomStream(cfg.master_seed).split(size_index);
    std::vector<Slot> slots(cfg.replications);

    // shared graph for --reuse-graph: node ranks of one realization, trees rebuilt on its sequence
    struct Shared {
        ExtendedBiDegreeSequence sequence;
        RankVector converged, truncated;
    };
    std::unique_ptr<Shared> shared;
    if (cfg.reuse_graph) {
        RandomStream rng = base.split(cfg.replications);
        shared = std::make_unique<Shared>();
        shared->sequence = run_iid_algorithm(model, n, rng).sequence;
        const auto graph = build_graph(shared->sequence, rng);
        shared->converged = converged_ranks(graph, cfg);
        shared->truncated = fixed_iterations(graph, graph.attributes.personalization, cfg.r0, depth,
                                             cfg.model.damping_bound());
    }

    parallel_for(cfg.replications, cfg.threads, [&](std::size_t i) {
        Slot& slot = slots[i];
        const RandomStream stream = base.split(i);
        try {
            RandomStream graph_rng = stream.split(0);
            RandomStream wbp_rng = stream.split(1);
            if (shared) {
                CouplingOptions opts;
                opts.complete_graph = false;
                const auto coupled = build_coupled(shared->sequence, depth, graph_rng, opts);
                slot.converged = shared->converged.values[coupled.first_node];
                slot.truncated = shared->truncated.values[coupled.first_node];
                slot.iterations = shared->converged.iterations;
                slot.tree = tbt_root_rank(coupled.tree, cfg.r0, depth);
                slot.tau = coupled.tau.generation;
            } else {
                const auto seq = run_iid_algorithm(model, n, graph_rng).sequence;
                const auto coupled = build_coupled(seq, depth, graph_rng);
                const auto conv = converged_ranks(coupled.graph, cfg);
                const auto trunc = fixed_iterations(coupled.graph, coupled.graph.attributes.personalization,
                                                    cfg.r0, depth, cfg.model.damping_bound());
                slot.converged = conv.values[coupled.first_node];
                slot.truncated = trunc.values[coupled.first_node];
                slot.iterations = conv.iterations;
                slot.tree = tbt_root_rank(coupled.tree, cfg.r0, depth);
                slot.tau = coupled.tau.generation;
            }
            slot.limit = sample_r_star(laws, cfg.wbp_generations, wbp_rng, cfg.r0, cfg.max_wbp_nodes);
            slot.ok = true;
        } catch (const InvalidParameter&) {
            throw;
        } catch (const std::exception& e) {
            slot.error = failure_text(i, e.what());
        }
    });

    SizeResult out;
    out.n = n;
    out.tbt_depth = depth;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& s = slots[i];
        if (!s.ok) {
            out.failures.push_back(s.error);
            continue;
        }
        out.replication.push_back(i);
        out.rank_converged.push_back(s.converged);
        out.rank_truncated.push_back(s.truncated);
        out.tree_rank.push_back(s.tree);
        out.limit.push_back(s.limit);
        out.coupling_time.push_back(s.tau);
        out.max_iterations_used = std::max<std::size_t>(out.max_iterations_used, static_cast<std::size_t>(s.iterations));
    }
    const double allowed = cfg.failure_budget * static_cast<double>(cfg.replications);
    if (static_cast<double>(out.failures.size()) > allowed || out.replication.size() < 2) {
        std::ostringstream os;
        os << "n = " << n << ": " << out.failures.size() << " of " << cfg.replications
           << " replications failed (budget " << allowed << ")";
        if (!out.failures.empty()) os << "; first: " << out.failures.front();
        throw FailureBudgetExceeded(os.str());
    }
    if (log) {
        std::ostringstream os;
        os << "n=" << n << " k_n=" << depth << " replications=" << out.replication.size()
           << " failures=" << out.failures.size();
        log(os.str());
    }
    return out;
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const Logger& log) {
    config.validate();
    const DegreeModel model(config.model);
    const LimitLaws laws = analytic_limit_laws(model);
    ExperimentReport report;
    report.config = config;
    for (std::size_t s = 0; s < config.n_values.size(); ++s)
        report.sizes.push_back(run_size(config, model, laws, s, log));
    return report;
}

namespace {

const char* const kBatchNames[4] = {"R_converged", "R_truncated", "R_tree", "R_star"};

std::array<EmpiricalDistribution, 4> batches(const SizeResult& r) {
    return {EmpiricalDistribution(r.rank_converged), EmpiricalDistribution(r.rank_truncated),
            EmpiricalDistribution(r.tree_rank), EmpiricalDistribution(r.limit)};
}

std::vector<double> ecdf_grid(const std::array<EmpiricalDistribution, 4>& b, std::size_t points) {
    double lo = b[0][0], hi = b[0][b[0].count() - 1];
    for (const auto& d : b) {
        lo = std::min(lo, d[0]);
        hi = std::max(hi, d[d.count() - 1]);
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.back() = hi;
    return grid;
}

} // namespace

Json experiment_summary(const ExperimentReport& report) {
    Json j;
    j["config"] = report.config.to_json();
    Json sizes = Json::array();
    for (const auto& r : report.sizes) {
        const auto b = batches(r);
        Json s;
        s["n"] = r.n;
        s["tbt_depth"] = r.tbt_depth;
        s["count"] = r.replication.size();
        s["failures"] = r.failures;
        s["max_power_iterations"] = r.max_iterations_used;
        std::size_t intact = 0;
        for (int t : r.coupling_time) intact += t > r.tbt_depth;
        s["coupling_intact_fraction"] = static_cast<double>(intact) / static_cast<double>(r.coupling_time.size());
        Json means;
        for (int a = 0; a < 4; ++a) means[kBatchNames[a]] = b[a].mean();
        s["means"] = means;
        Json kr;
        for (int a = 0; a < 4; ++a)
            for (int c = a + 1; c < 4; ++c)
                kr[std::string(kBatchNames[a]) + "~" + kBatchNames[c]] = kr_distance(b[a], b[c]);
        s["kr_distance"] = kr;
        s["mse"] = sorted_mse(b[0], b[3], MseForm::Squared);
        s["mse_unsquared"] = sorted_mse(b[0], b[3], MseForm::Unsquared);
        const auto ks = ks_two_sample(b[0], b[3]);
        s["ks_converged_vs_limit"] = {{"statistic", ks.statistic}, {"critical_1pct", ks.critical}, {"reject", ks.reject}};
        sizes.push_back(s);
    }
    j["sizes"] = sizes;
    return j;
}

void write_experiment_outputs(const ExperimentReport& report, const std::filesystem::path& dir) {
    for (const auto& r : report.sizes) {
        std::ostringstream samples;
        samples << "replication";
        for (const char* name : kBatchNames) samples << ',' << name;
        samples << ",tau\n";
        for (std::size_t i = 0; i < r.replication.size(); ++i)
            samples << r.replication[i] << ',' << format_double(r.rank_converged[i]) << ','
                    << format_double(r.rank_truncated[i]) << ',' << format_double(r.tree_rank[i]) << ','
                    << format_double(r.limit[i]) << ',' << r.coupling_time[i] << '\n';
        write_file_atomic(dir / ("samples_n" + std::to_string(r.n) + ".csv"), samples.str());

        const auto b = batches(r);
        std::ostringstream ecdf;
        ecdf << "x";
        for (const char* name : kBatchNames) ecdf << ',' << name;
        ecdf << '\n';
        for (double x : ecdf_grid(b, report.config.ecdf_points)) {
            ecdf << format_double(x);
            for (const auto& d : b) ecdf << ',' << format_double(d.cdf(x));
            ecdf << '\n';
        }
        write_file_atomic(dir / ("ecdf_n" + std::to_string(r.n) + ".csv"), ecdf.str());
    }
    write_file_atomic(dir / "report.json", dump_json(experiment_summary(report)));
}

void TailcheckConfig::validate() const {
    model.validate();
    if (samples < 10) throw InvalidParameter("tailcheck needs at least 10 samples");
    if (generations < 0) throw InvalidParameter("generations must be >= 0");
    for (double q : quantiles)
        if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("tail quantiles must lie in (0, 1)");
    if (!(hill_fraction > 0.0 && hill_fraction <= 0.2)) throw InvalidParameter("hill_fraction must lie in (0, 0.2]");
    if (!(kappa > 0.0)) throw InvalidParameter("kappa must be positive");
}

TailcheckConfig TailcheckConfig::from_json(const Json& j) {
    if (!j.is_object()) throw InvalidParameter("tailcheck config must be a JSON object");
    static const std::set<std::string> known{"model", "c", "samples", "generations", "r_leaf", "quantiles",
                                             "hill_fraction", "kappa", "seed", "output_dir",
                                             "max_wbp_nodes", "threads"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw InvalidParameter("unknown tailcheck key '" + key + "'");
    TailcheckConfig cfg;
    apply_model_keys(j, cfg.model);
    if (j.contains("samples")) cfg.samples = get_count(j.at("samples"), "samples");
    if (j.contains("generations")) cfg.generations = get_as<int>(j.at("generations"), "generations");
    if (j.contains("r_leaf")) cfg.r_leaf = get_as<double>(j.at("r_leaf"), "r_leaf");
    if (j.contains("quantiles")) cfg.quantiles = get_as<std::vector<double>>(j.at("quantiles"), "quantiles");
    if (j.contains("hill_fraction")) cfg.hill_fraction = get_as<double>(j.at("hill_fraction"), "hill_fraction");
    if (j.contains("kappa")) cfg.kappa = get_as<double>(j.at("kappa"), "kappa");
    if (j.contains("seed")) cfg.master_seed = get_as<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("output_dir")) cfg.output_dir = get_as<std::string>(j.at("output_dir"), "output_dir");
    if (j.contains("max_wbp_nodes")) cfg.max_wbp_nodes = get_count(j.at("max_wbp_nodes"), "max_wbp_nodes");
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(j.at("threads"), "threads"));
    cfg.validate();
    return cfg;
}

Json TailcheckConfig::to_json() const {
    Json j;
    j["model"] = dcmrank::to_json(model);
    j["samples"] = samples;
    j["generations"] = generations;
    j["r_leaf"] = r_leaf;
    j["quantiles"] = quantiles;
    j["hill_fraction"] = hill_fraction;
    j["kappa"] = kappa;
    j["seed"] = master_seed;
    j["max_wbp_nodes"] = max_wbp_nodes;
    return j;
}

TailcheckReport run_tailcheck(const LimitLaws& laws, const DegreeLaw& offspring_law, double alpha,
                              const TailcheckConfig& config) {
    config.validate();
    const RandomStream base(config.master_seed);
    std::vector<double> values(config.samples);
    std::vector<char> ok(config.samples, 0);
    parallel_for(config.samples, config.threads, [&](std::size_t i) {
        RandomStream rng = base.split(i);
        try {
            values[i] = sample_r_star(laws, config.generations, rng, config.r_leaf, config.max_wbp_nodes);
            ok[i] = 1;
        } catch (const PopulationCapExceeded&) {
        }
    });
    TailcheckReport report;
    report.alpha = alpha;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (ok[i]) report.samples.push_back(values[i]);
        else ++report.failures;
    }
    const EmpiricalDistribution dist(report.samples);

    const auto& br = *laws.branching;
    TailInputs in;
    in.mean_root_offspring = laws.root->mean_offspring();
    in.weight_alpha_moment = br.weight_abs_moment(alpha);
    in.kappa = config.kappa;
    in.rho = br.mean_offspring() * br.mean_weight();
    in.rho_alpha = br.rho_alpha(alpha);
    in.mean_personalization = br.mean_personalization();
    in.mean_weight = br.mean_weight();
    in.alpha = alpha;
    report.prediction = tail_constant(in, TailCase::NDominant);

    if (laws.root->mean_offspring() == 0.0 && br.mean_offspring() == 0.0) {
        report.degenerate = true;
        report.degenerate_reason = "no offspring: every sample equals the root personalization";
    } else {
        try {
            report.hill_index = tail_index_estimate(dist, config.hill_fraction);
        } catch (const InvalidParameter& e) {
            report.degenerate = true;
            report.degenerate_reason = e.what();
        }
    }
    if (dist.empty()) return report;
    for (double q : config.quantiles) {
        TailRatio t;
        t.quantile = q;
        t.x = dist.quantile(q);
        t.sample_tail = 1.0 - dist.cdf(t.x);
        t.offspring_tail = offspring_law.survival(static_cast<std::int64_t>(std::floor(t.x)));
        t.ratio = t.offspring_tail > 0.0 ? t.sample_tail / t.offspring_tail : 0.0;
        report.ratios.push_back(t);
    }
    return report;
}

TailcheckReport run_tailcheck(const TailcheckConfig& config) {
    const DegreeModel model(config.model);
    return run_tailcheck(analytic_limit_laws(model), model.in_law(), config.model.alpha, config);
}

Json tailcheck_summary(const TailcheckReport& report, const TailcheckConfig& config) {
    Json j;
    j["config"] = config.to_json();
    j["count"] = report.samples.size();
    j["failures"] = report.failures;
    j["degenerate"] = report.degenerate;
    if (report.degenerate) j["degenerate_reason"] = report.degenerate_reason;
    else j["hill_index"] = report.hill_index;
    j["alpha"] = report.alpha;
    j["prediction"] = {{"case", report.prediction.tail_case == TailCase::NDominant ? "N-dominant" : "Q-dominant"},
                       {"rho", report.prediction.rho},
                       {"rho_alpha", report.prediction.rho_alpha},
                       {"kappa", report.prediction.kappa},
                       {"prefactor", report.prediction.prefactor}};
    Json ratios = Json::array();
    for (const auto& t : report.ratios)
        ratios.push_back({{"quantile", t.quantile},
                          {"x", t.x},
                          {"sample_tail", t.sample_tail},
                          {"offspring_tail", t.offspring_tail},
                          {"ratio", t.ratio},
                          {"ratio_over_prediction", t.ratio / report.prediction.prefactor}});
    j["ratios"] = ratios;
    return j;
}

} // namespace dcmrank
