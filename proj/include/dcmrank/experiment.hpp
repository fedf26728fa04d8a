#pragma once

#include "dcmrank/degree_law.hpp"
#include "dcmrank/io.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/stats.hpp"
#include "dcmrank/wbp.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dcmrank {

using Logger = std::function<void(const std::string&)>;

/**
 * Runs `count` indexed tasks on up to `threads` workers. Tasks write to their
 * own slots, so results do not depend on scheduling.
 */
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

struct ExperimentConfig {
    DegreeModelParams model = DegreeModelParams::pagerank(1.5, 2.5, 2.0, 0.3);
    std::vector<std::size_t> n_values{10, 100, 10000};
    std::size_t replications = 1000;
    int wbp_generations = 10;
    int tbt_depth = -1;  // negative: floor(ln n)
    double r0 = 1.0;     // start vector of the iterations and leaf value of both trees
    double tolerance = 1e-10;
    int max_iterations = 1000;
    std::uint64_t master_seed = 1;
    std::string output_dir = "experiment_out";
    bool reuse_graph = false;
    double failure_budget = 0.01;
    std::size_t ecdf_points = 201;
    std::size_t max_wbp_nodes = 10'000'000;
    unsigned threads = 1;

    //! Throws InvalidParameter.
    void validate() const;
    [[nodiscard]] int tbt_depth_for(std::size_t n) const;

    //! Unknown keys are rejected. A top-level "c" sets damping c and personalization 1 - c.
    static ExperimentConfig from_json(const Json& j);
    [[nodiscard]] Json to_json() const;
};

struct SizeResult {
    std::size_t n = 0;
    int tbt_depth = 0;
    std::vector<std::size_t> replication;  // indices of the successful replications
    std::vector<double> rank_converged;    // R_1^(n, inf)
    std::vector<double> rank_truncated;    // R_1^(n, k_n)
    std::vector<double> tree_rank;         // R^(n, k_n)
    std::vector<double> limit;             // R*
    std::vector<int> coupling_time;
    std::vector<std::string> failures;     // "replication i: message"
    std::size_t max_iterations_used = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<SizeResult> sizes;
};

//! Throws FailureBudgetExceeded when more than failure_budget of some size's replications fail.
ExperimentReport run_experiment(const ExperimentConfig& config, const Logger& log = {});

/**
 * samples_n<n>.csv, ecdf_n<n>.csv and report.json under `dir`. The files are
 * pure functions of the configuration and seed.
 */
void write_experiment_outputs(const ExperimentReport& report, const std::filesystem::path& dir);
Json experiment_summary(const ExperimentReport& report);

struct TailcheckConfig {
    DegreeModelParams model = DegreeModelParams::pagerank(2.5, 2.5, 2.0, 0.3);
    std::size_t samples = 100'000;
    int generations = 10;
    double r_leaf = 0.0;
    std::vector<double> quantiles{0.99, 0.999};
    double hill_fraction = kDefaultHillFraction;
    double kappa = 1.0;
    std::uint64_t master_seed = 1;
    std::string output_dir = "tailcheck_out";
    std::size_t max_wbp_nodes = 10'000'000;
    unsigned threads = 1;

    void validate() const;
    static TailcheckConfig from_json(const Json& j);
    [[nodiscard]] Json to_json() const;
};

struct TailRatio {
    double quantile = 0.0;
    double x = 0.0;
    double sample_tail = 0.0;   // empirical P(R* > x)
    double offspring_tail = 0.0;  // P(N > x)
    double ratio = 0.0;
};

struct TailcheckReport {
    std::vector<double> samples;
    bool degenerate = false;
    std::string degenerate_reason;
    double hill_index = 0.0;
    double alpha = 0.0;
    TailPrediction prediction;
    std::vector<TailRatio> ratios;
    std::size_t failures = 0;
};

/**
 * Samples R* from the given laws, fits the Hill index and compares empirical
 * tail ratios P(R* > x) / P(N > x) with the N-dominant prediction.
 */
TailcheckReport run_tailcheck(const LimitLaws& laws, const DegreeLaw& offspring_law, double alpha,
                              const TailcheckConfig& config);
//! Analytic limit laws of config.model; alpha is the in-degree tail index.
TailcheckReport run_tailcheck(const TailcheckConfig& config);

Json tailcheck_summary(const TailcheckReport& report, const TailcheckConfig& config);

} // namespace dcmrank
