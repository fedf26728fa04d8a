#include "dcmrank/errors.hpp"
#include "dcmrank/experiment.hpp"
#include "dcmrank/io.hpp"
#include "dcmrank/stats.hpp"
#include "dcmrank/wbp.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dcmrank;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "dcmrank_unit" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DCMRANK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig c;
    c.n_values = {10, 50};
    c.replications = 20;
    c.output_dir = out.string();
    return c;
}

std::string dir_bytes(const fs::path& dir) {
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (auto& f : files) all += f.filename().string() + "\n" + read_file(f);
    return all;
}

}

TEST_SUITE("experiment") {

TEST_CASE("config") {
    ExperimentConfig c;
    CHECK(c.tbt_depth_for(10000) == 9);
    CHECK(c.tbt_depth_for(10) == 2);
    CHECK(c.tbt_depth_for(100) == 4);
    c.replications = 1;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = ExperimentConfig{};
    c.n_values = {0};
    CHECK_THROWS_AS(c.validate(), InvalidParameter);

    const auto j = Json::parse(R"({"n_values": [5], "replications": 3, "c": 0.2, "seed": 9})");
    const auto parsed = ExperimentConfig::from_json(j);
    CHECK(parsed.n_values == std::vector<std::size_t>{5});
    CHECK(parsed.master_seed == 9);
    CHECK(parsed.model.damping == ScalarLaw::point(0.2));
    CHECK(parsed.model.personalization == ScalarLaw::point(0.8));
    CHECK_THROWS(ExperimentConfig::from_json(Json::parse(R"({"replication": 3})")));
    const auto again = ExperimentConfig::from_json(parsed.to_json());
    CHECK(dump_json(again.to_json()) == dump_json(parsed.to_json()));
}

TEST_CASE("smoke run with two replications") {
    ExperimentConfig c;
    c.n_values = {10};
    c.replications = 2;
    const auto report = run_experiment(c);
    REQUIRE(report.sizes.size() == 1);
    const auto& s = report.sizes[0];
    CHECK(s.rank_converged.size() == 2);
    CHECK(s.rank_truncated.size() == 2);
    CHECK(s.tree_rank.size() == 2);
    CHECK(s.limit.size() == 2);
    CHECK(s.tbt_depth == 2);
    const auto dir = scratch("smoke");
    write_experiment_outputs(report, dir);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "samples_n10.csv"));
    CHECK(fs::exists(dir / "ecdf_n10.csv"));
    const auto j = Json::parse(read_file(dir / "report.json"));
    CHECK(j.contains("sizes"));
}

TEST_CASE("tree and truncated ranks agree before the coupling breaks") {
    const auto report = run_experiment(small_config(scratch("agree")));
    for (const auto& s : report.sizes) {
        for (std::size_t i = 0; i < s.tree_rank.size(); ++i) {
            if (s.coupling_time[i] > s.tbt_depth)
                CHECK(std::abs(s.tree_rank[i] - s.rank_truncated[i]) <= 1e-12 * std::max(1.0, s.tree_rank[i]));
        }
    }
}

TEST_CASE("outputs are deterministic and thread-count independent") {
    auto c = small_config(scratch("det_a"));
    write_experiment_outputs(run_experiment(c), c.output_dir);
    const auto first = dir_bytes(c.output_dir);
    c.output_dir = scratch("det_b").string();
    c.threads = 3;
    write_experiment_outputs(run_experiment(c), c.output_dir);
    CHECK(dir_bytes(c.output_dir) == first);
    c.master_seed = 2;
    c.output_dir = scratch("det_c").string();
    write_experiment_outputs(run_experiment(c), c.output_dir);
    CHECK(dir_bytes(c.output_dir) != first);
}

TEST_CASE("failure budget") {
    auto c = small_config(scratch("budget"));
    c.max_iterations = 1;  // nothing converges
    CHECK_THROWS_AS(run_experiment(c), FailureBudgetExceeded);
    c.failure_budget = 1.0;  // no batch left to compare
    CHECK_THROWS_AS(run_experiment(c), FailureBudgetExceeded);
    c.max_iterations = 1000;
    c.max_wbp_nodes = 300;  // large R* trees hit the cap
    const auto report = run_experiment(c);
    for (const auto& s : report.sizes) {
        CHECK(s.failures.size() > 0);
        CHECK(s.failures.size() + s.replication.size() == c.replications);
        CHECK(s.limit.size() == s.rank_converged.size());
    }
}

TEST_CASE("reuse-graph mode") {
    auto c = small_config(scratch("reuse"));
    c.reuse_graph = true;
    const auto report = run_experiment(c);
    for (const auto& s : report.sizes) CHECK(s.rank_converged.size() == c.replications);
}

TEST_CASE("tail check") {
    TailcheckConfig c;
    c.samples = 20000;
    const auto rep = run_tailcheck(c);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.samples.size() == c.samples);
    const DegreeModel model(c.model);
    const auto laws = analytic_limit_laws(model);
    TailInputs in;
    in.mean_root_offspring = laws.root->mean_offspring();
    in.weight_alpha_moment = laws.branching->weight_abs_moment(2.5);
    in.kappa = 1.0;
    in.rho = laws.branching->mean_offspring() * laws.branching->mean_weight();
    in.rho_alpha = laws.branching->rho_alpha(2.5);
    in.mean_personalization = laws.branching->mean_personalization();
    in.mean_weight = laws.branching->mean_weight();
    in.alpha = 2.5;
    CHECK(rep.prediction.prefactor == doctest::Approx(tail_constant(in, TailCase::NDominant).prefactor));
    REQUIRE(rep.ratios.size() == 2);
    CHECK(rep.ratios[1].quantile == 0.999);

    const auto none = std::make_shared<FiniteDegreeLaw>(FiniteDegreeLaw::point(0));
    LimitLaws dead{std::make_shared<ProductRootLaw>(none, ScalarLaw::point(0.7)),
                   std::make_shared<ProductBranchingLaw>(none, ScalarLaw::point(0.7),
                                                         WeightLaw::direct(ScalarLaw::point(0.3)))};
    c.samples = 1000;
    const auto d = run_tailcheck(dead, *none, 2.5, c);
    CHECK(d.degenerate);
    for (double x : d.samples) CHECK(x == 0.7);
}

}

TEST_SUITE("cli") {

TEST_CASE("generate is deterministic") {
    const auto a = scratch("gen_a"), b = scratch("gen_b");
    CHECK(run_cli("--seed 7 --out " + a.string() + " generate --n 10") == 0);
    CHECK(run_cli("--seed 7 --out " + b.string() + " generate --n 10") == 0);
    CHECK(read_file(a / "sequence.csv") == read_file(b / "sequence.csv"));
    CHECK(read_file(a / "sequence.json") == read_file(b / "sequence.json"));
}

TEST_CASE("invalid parameters leave no files") {
    const auto dir = scratch("bad");
    const auto cfg = dir / "bad.json";
    std::ofstream(cfg) << R"({"model": {"alpha": 0.9}})";
    const auto out = dir / "out";
    CHECK(run_cli("--config " + cfg.string() + " --out " + out.string() + " generate --n 10") == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("--out " + out.string() + " generate --n") == 2);
    CHECK(run_cli("--out " + out.string() + " nosuchverb") == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("large generate run") {
    const auto dir = scratch("gen_big");
    REQUIRE(run_cli("--seed 3 --out " + dir.string() + " generate --n 10000") == 0);
    std::istringstream is(read_file(dir / "sequence.csv"));
    const auto seq = read_sequence_csv(is);
    CHECK(seq.size() == 10000);
    CHECK(seq.total_in() == seq.total_out());
}

TEST_CASE("pipeline verbs") {
    const auto dir = scratch("pipe");
    const auto d = dir.string();
    REQUIRE(run_cli("--seed 4 --out " + d + " generate --n 300") == 0);
    REQUIRE(run_cli("--seed 4 --out " + d + " graph --sequence " + d + "/sequence.csv") == 0);
    REQUIRE(run_cli("--out " + d + " rank --sequence " + d + "/sequence.csv --edges " + d + "/edges.csv") == 0);
    std::istringstream is(read_file(dir / "ranks.csv"));
    CHECK(read_rank_csv(is).size() == 300);
    CHECK(run_cli("--seed 4 --out " + d + "/c couple --n 300 --depth 3") == 0);
    CHECK(fs::exists(dir / "c" / "tree.csv"));
    CHECK(run_cli("--seed 4 --out " + d + "/w wbp --samples 100") == 0);
    CHECK(fs::exists(dir / "w" / "samples.csv"));
}

TEST_CASE("experiment verb and budget exit code") {
    const auto dir = scratch("exp");
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"n_values": [10], "replications": 5})";
    CHECK(run_cli("--config " + cfg.string() + " --out " + (dir / "o").string() + " experiment") == 0);
    CHECK(fs::exists(dir / "o" / "report.json"));
    const auto over = dir / "over.json";
    std::ofstream(over) << R"({"n_values": [10], "replications": 5, "max_iterations": 1})";
    CHECK(run_cli("--config " + over.string() + " --out " + (dir / "p").string() + " experiment") == 3);
}

}
