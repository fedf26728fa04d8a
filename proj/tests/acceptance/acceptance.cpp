#include "dcmrank/coupling.hpp"
#include "dcmrank/errors.hpp"
#include "dcmrank/experiment.hpp"
#include "dcmrank/graph.hpp"
#include "dcmrank/io.hpp"
#include "dcmrank/rank.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/stats.hpp"
#include "dcmrank/wbp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace dcmrank;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

const DegreeModel& default_model() {
    static const DegreeModel model(DegreeModelParams::pagerank(1.5, 2.5, 2.0, 0.3));
    return model;
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << x;
    return os.str();
}

std::string join(const std::vector<double>& v, int precision = 4) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], precision);
    return s;
}

// least-squares slope of y on x
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

Outcome criterion1() {
    std::size_t ok = 0;
    double worst = 0.0;
    const int runs = 1000;
    for (int r = 0; r < runs; ++r) {
        RandomStream rng = RandomStream(1).split(r);
        const auto seq = run_iid_algorithm(default_model(), 1000, rng).sequence;
        const double load = seq.max_weight_load();
        worst = std::max(worst, load);
        ok += seq.is_balanced() && load <= 0.3;
    }
    return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) +
                            " runs balanced with max |C|D <= 0.3; worst load " + fmt(worst, 17)};
}

Outcome criterion2() {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        RandomStream rng = RandomStream(2).split(s);
        const auto seq = run_iid_algorithm(default_model(), 200, rng).sequence;
        const auto g = build_graph(seq, rng);
        const auto p = power_iteration(g, seq.personalization, RankingConfig{});
        const auto e = solve_exact(g, seq.personalization);
        for (std::size_t i = 0; i < g.node_count(); ++i)
            worst = std::max(worst, std::abs(p.values[i] - e.values[i]));
    }
    return {worst <= 1e-8, "max sup-norm gap over 100 graphs " + fmt(worst, 3)};
}

double error_slope(double r0, const std::vector<DirectedMultigraph>& graphs,
                   const std::vector<std::vector<double>>& exact, std::vector<double>* mean_err) {
    std::vector<double> ks, logs;
    for (int k = 3; k <= 20; ++k) {
        double total = 0.0;
        for (std::size_t g = 0; g < graphs.size(); ++g) {
            const auto r = fixed_iterations(graphs[g], graphs[g].attributes.personalization, r0, k, 0.3);
            double l1 = 0.0;
            for (std::size_t i = 0; i < r.values.size(); ++i) l1 += std::abs(r.values[i] - exact[g][i]);
            total += l1;
        }
        const double mean = total / double(graphs.size());
        if (mean_err) mean_err->push_back(mean);
        ks.push_back(k);
        logs.push_back(std::log(mean));
    }
    return slope(ks, logs);
}

Outcome criterion3() {
    std::vector<DirectedMultigraph> graphs;
    std::vector<std::vector<double>> exact;
    for (int s = 0; s < 20; ++s) {
        RandomStream rng = RandomStream(3).split(s);
        const auto seq = run_iid_algorithm(default_model(), 500, rng).sequence;
        graphs.push_back(build_graph(seq, rng));
        exact.push_back(solve_exact(graphs.back(), seq.personalization).values);
    }
    std::vector<double> err;
    const double b0 = error_slope(0.0, graphs, exact, &err);
    const double b1 = error_slope(1.0, graphs, exact, nullptr);
    const double target = std::log(0.3);
    const double rel = std::abs(b0 - target) / std::abs(target);
    return {rel <= 0.10, "slope " + fmt(b0, 6) + " vs log 0.3 = " + fmt(target, 6) + " (relative gap " +
                             fmt(rel, 3) + "); mean L1 error at k=3 " + fmt(err.front(), 4) + ", k=20 " +
                             fmt(err.back(), 4) + "; start vector 1 gives slope " + fmt(b1, 4)};
}

Outcome criterion4() {
    int compared = 0, violations = 0;
    const int r = 3;
    for (int s = 0; s < 1000; ++s) {
        RandomStream rng = RandomStream(4).split(s);
        const auto seq = run_iid_algorithm(default_model(), 1000, rng).sequence;
        const auto res = build_coupled(seq, r, rng);
        if (res.tau.generation <= r) continue;
        ++compared;
        violations += graph_ball_signature(res.graph, res.first_node, r) != tree_ball_signature(res.tree, r);
    }
    return {violations == 0 && compared > 0, std::to_string(compared) + " of 1000 replications had tau > 3; " +
                                                 std::to_string(violations) + " signature mismatches"};
}

Outcome criterion5() {
    struct Point {
        double c, mean;
        int k;
    };
    const Point points[] = {{0.15, 2.0, 10}, {0.3, 2.0, 10}, {0.5, 1.2, 20}};
    bool all = true;
    std::string detail;
    int idx = 0;
    for (const auto& p : points) {
        const auto laws = analytic_limit_laws(DegreeModel(DegreeModelParams::pagerank(2.5, 2.5, p.mean, p.c)));
        const auto& law = *laws.branching;
        const std::size_t m = 100000;
        std::vector<double> xs(m);
        const RandomStream base = RandomStream(5).split(idx++);
        for (std::size_t i = 0; i < m; ++i) {
            RandomStream rng = base.split(i);
            xs[i] = sample_endogenous(law, p.k, 0.0, rng);
        }
        const EmpiricalDistribution d(std::move(xs));
        const double rho = law.mean_offspring() * law.mean_weight();
        const double target = law.mean_personalization() / (1.0 - rho);
        const double z = (d.mean() - target) / d.standard_error();
        const bool ok = std::abs(z) <= 3.0;
        all = all && ok;
        detail += (detail.empty() ? "" : "; ") + std::string("c=") + fmt(p.c) + " E[N]=" + fmt(p.mean) + ": mean " +
                  fmt(d.mean(), 6) + " vs " + fmt(target, 6) + " (z=" + fmt(z, 3) + ")";
    }
    return {all, detail};
}

const std::vector<double>& experiment_metric(std::uint64_t seed, const std::string& key) {
    static std::map<std::pair<std::uint64_t, std::string>, std::vector<double>> cache;
    const auto id = std::make_pair(seed, key);
    if (!cache.count(id)) {
        ExperimentConfig cfg;
        cfg.master_seed = seed;
        const auto summary = experiment_summary(run_experiment(cfg));
        std::vector<double> mse, kr;
        for (const auto& s : summary.at("sizes")) {
            mse.push_back(s.at("mse").get<double>());
            kr.push_back(s.at("kr_distance").at("R_converged~R_star").get<double>());
        }
        cache[{seed, "mse"}] = mse;
        cache[{seed, "kr"}] = kr;
    }
    return cache.at(id);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

Outcome criterion6() {
    const auto& mse = experiment_metric(1, "mse");
    const bool ok = strictly_decreasing(mse) && mse.back() <= 0.10;
    return {ok, "seed 1, n = 10, 100, 10000: MSE " + join(mse) + "; KR " + join(experiment_metric(1, "kr"))};
}

Outcome criterion7() {
    int monotone = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto& kr = experiment_metric(seed, "kr");
        const bool dec = strictly_decreasing(kr);
        monotone += dec;
        detail += " [" + std::to_string(seed) + ": " + join(kr) + (dec ? "" : " x") + "]";
    }
    return {monotone >= 9, std::to_string(monotone) + "/10 seeds with decreasing KR;" + detail};
}

Outcome criterion8() {
    int close = 0;
    std::vector<double> hill, pooled;
    TailPrediction prediction;
    std::vector<double> diag_fraction;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TailcheckConfig cfg;
        cfg.master_seed = seed;
        auto rep = run_tailcheck(cfg);
        prediction = rep.prediction;
        hill.push_back(rep.degenerate ? std::numeric_limits<double>::quiet_NaN() : rep.hill_index);
        close += !rep.degenerate && std::abs(rep.hill_index - 2.5) <= 0.3;
        if (seed == 1) {
            const EmpiricalDistribution d(rep.samples);
            for (double f : {0.2, 0.05, 0.01, 0.002}) diag_fraction.push_back(tail_index_estimate(d, f));
        }
        pooled.insert(pooled.end(), rep.samples.begin(), rep.samples.end());
    }
    const DegreeModel model(TailcheckConfig{}.model);
    const EmpiricalDistribution all(std::move(pooled));
    const double x = all.quantile(0.999);
    const double sample_tail = 1.0 - all.cdf(x);
    const double offspring_tail = 1.0 - model.in_law().cdf(static_cast<std::int64_t>(std::floor(x)));
    const double ratio = sample_tail / offspring_tail;
    const double factor = ratio / prediction.prefactor;
    const bool ratio_ok = factor >= 1.0 / 3.0 && factor <= 3.0;
    return {close >= 18 && ratio_ok,
            std::to_string(close) + "/20 seeds with Hill index within 0.3 of 2.5 (indices " + join(hill, 3) +
                "); seed 1 Hill at top 20%, 5%, 1%, 0.2%: " + join(diag_fraction, 3) +
                "; pooled ratio at the 99.9th percentile (x=" + fmt(x) + ") " + fmt(ratio) + " vs prediction " +
                fmt(prediction.prefactor) + " (factor " + fmt(factor, 3) + ")"};
}

Outcome criterion9() {
    RandomStream rng(9);
    int exact = 0;
    const int instances = 1000;
    for (int t = 0; t < instances; ++t) {
        const std::size_t m = 1 + rng.below(6);
        std::vector<double> a(m), b(m);
        for (auto& v : a) v = 0.25 * (static_cast<double>(rng.below(101)) - 50.0);
        for (auto& v : b) v = 0.25 * (static_cast<double>(rng.below(101)) - 50.0);
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double cost = 0.0;
            for (std::size_t i = 0; i < m; ++i) cost += std::abs(a[i] - b[perm[i]]);
            best = std::min(best, cost);
        } while (std::next_permutation(perm.begin(), perm.end()));
        exact += kr_distance(EmpiricalDistribution(a), EmpiricalDistribution(b)) == best / double(m);
    }
    return {exact == instances, std::to_string(exact) + "/" + std::to_string(instances) + " instances exactly equal"};
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
    return out;
}

Outcome criterion10() {
    const auto root = fs::temp_directory_path() / "dcmrank_acceptance_determinism";
    fs::remove_all(root);
    int status[2];
    for (int run = 0; run < 2; ++run) {
        const std::string cmd = std::string(DCMRANK_CLI_PATH) + " --seed 11 --out " +
                                (root / ("run" + std::to_string(run))).string() + " experiment > /dev/null 2>&1";
        status[run] = std::system(cmd.c_str());
    }
    if (status[0] != 0 || status[1] != 0) return {false, "experiment command failed"};
    const auto a = directory_bytes(root / "run0"), b = directory_bytes(root / "run1");
    std::size_t bytes = 0;
    for (const auto& [name, content] : a) bytes += content.size();
    const bool same = a == b && !a.empty();
    fs::remove_all(root);
    return {same, std::to_string(a.size()) + " files, " + std::to_string(bytes) + " bytes, " +
                      (same ? "identical" : "different")};
}

struct Criterion {
    int id;
    double time_limit_s;
    std::function<Outcome()> run;
};

}

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, 10, criterion1},   {2, 30, criterion2},   {3, 60, criterion3},  {4, 120, criterion4},
        {5, 300, criterion5},  {6, 1800, criterion6}, {7, 1800, criterion7}, {8, 600, criterion8},
        {9, 10, criterion9},   {10, 600, criterion10},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool pass = o.pass && in_time;
        all_pass = all_pass && pass;
        std::cout << "Criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << " (" << o.detail << "; "
                  << fmt(secs, 3) << " s" << (in_time ? "" : ", over the time limit") << ")" << std::endl;
    }
    return all_pass ? 0 : 1;
}
