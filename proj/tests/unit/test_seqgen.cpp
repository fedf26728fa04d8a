#include "helpers.hpp"

#include "dcmrank/errors.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/stats.hpp"

#include <doctest.h>

#include <numeric>

using namespace dcmrank;

namespace {
const DegreeModel& default_model() {
    static const DegreeModel model(DegreeModelParams::pagerank(1.5, 2.5, 2.0, 0.3));
    return model;
}
}

TEST_SUITE("seqgen") {

TEST_CASE("parameter validation") {
    auto p = DegreeModelParams::pagerank(1.5, 2.5, 2.0, 0.3);
    CHECK(p.kappa0() == doctest::Approx(1.0 / 3.0));
    CHECK(DegreeModelParams::pagerank(3.0, 2.5, 2.0, 0.3).kappa0() == 0.5);
    CHECK_NOTHROW(p.validate());
    p.alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = DegreeModelParams::pagerank(1.5, 2.0, 2.0, 0.3);
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = DegreeModelParams::pagerank(1.5, 2.5, 2.0, 1.0);
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = DegreeModelParams::pagerank(1.5, 2.5, 2.0, 0.3);
    p.delta0 = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = DegreeModelParams::pagerank(1.5, 2.5, 1.0, 0.3);
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
}

TEST_CASE("raw pairs: empty for n = 0, means match") {
    RandomStream rng(1);
    CHECK(sample_raw_degree_pairs(default_model(), 0, rng).in.empty());
    const auto raw = sample_raw_degree_pairs(default_model(), 200'000, rng);
    std::vector<double> d(raw.out.begin(), raw.out.end());
    const auto ms = testing::mean_se(d);
    CHECK(std::abs(ms.mean - 2.0) <= 3.0 * ms.se);
}

TEST_CASE("iid algorithm output is balanced with bounded weights") {
    for (std::size_t n : {1u, 2u, 10u, 1000u, 10000u}) {
        RandomStream rng(n);
        const auto res = run_iid_algorithm(default_model(), n, rng);
        CAPTURE(n);
        CHECK(res.sequence.size() == n);
        CHECK(res.sequence.total_in() == res.sequence.total_out());
        CHECK(res.sequence.max_weight_load() <= 0.3);
        CHECK(res.rounds >= 1);
        CHECK(std::abs(static_cast<double>(res.imbalance)) <= imbalance_threshold(default_model().params(), n));
        for (std::size_t i = 0; i < n; ++i) CHECK(res.sequence.personalization[i] == 0.7);
    }
    RandomStream rng(0);
    CHECK_THROWS_AS(run_iid_algorithm(default_model(), 0, rng), InvalidParameter);
}

TEST_CASE("repair adds one out-stub to delta distinct nodes") {
    RawDegrees raw;
    raw.in = {2, 2, 2, 1, 1, 0};
    raw.out = {1, 0, 1, 1, 0, 0};  // delta = +5 - ... = 8 - 3 = 5
    const auto before = raw;
    const std::int64_t delta = 8 - 3;
    RandomStream rng(7);
    repair_imbalance(raw, rng);
    CHECK(raw.in == before.in);
    int bumped = 0;
    for (std::size_t i = 0; i < raw.out.size(); ++i) {
        const auto diff = raw.out[i] - before.out[i];
        CHECK((diff == 0 || diff == 1));
        bumped += static_cast<int>(diff);
    }
    CHECK(bumped == delta);

    RawDegrees neg;
    neg.in = {0, 0, 0, 0};
    neg.out = {1, 1, 1, 0};
    repair_imbalance(neg, rng);
    CHECK(std::accumulate(neg.in.begin(), neg.in.end(), 0) == 3);
    for (auto v : neg.in) CHECK(v <= 1);
    CHECK(neg.out == std::vector<std::int64_t>{1, 1, 1, 0});
}

TEST_CASE("repair with delta = +3 on a large node set") {
    RawDegrees raw;
    raw.in.assign(100, 1);
    raw.out.assign(100, 1);
    raw.in[0] += 3;
    const auto before = raw;
    RandomStream rng(3);
    repair_imbalance(raw, rng);
    CHECK(raw.in == before.in);
    int changed = 0;
    for (std::size_t i = 0; i < 100; ++i) changed += raw.out[i] != before.out[i];
    CHECK(changed == 3);
}

TEST_CASE("weight rule") {
    CHECK(weight_from_damping(-0.3, 0, 0.3) == -0.3);
    CHECK(weight_from_damping(0.2, 0, 0.3) == 0.3);
    CHECK(weight_from_damping(0.0, 0, 0.3) == 0.0);
    CHECK(weight_from_damping(0.3, 2, 0.3) == 0.15);
    for (std::int64_t d = 1; d < 5000; ++d) {
        const double w = weight_from_damping(0.3, d, 0.3);
        CHECK(w * static_cast<double>(d) <= 0.3);
        CHECK(w == doctest::Approx(0.3 / static_cast<double>(d)).epsilon(1e-15));
    }
}

TEST_CASE("in-degrees keep their law after the repair") {
    int passes = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        RandomStream rng(1000 + s);
        const auto seq = run_iid_algorithm(default_model(), 10000, rng).sequence;
        const auto ks = ks_discrete(seq.in_degree, [](std::int64_t k) { return default_model().in_law().cdf(k); });
        passes += !ks.reject;
    }
    CHECK(passes >= 19);
}

TEST_CASE("raw in-degree draws follow the law") {
    int passes = 0;
    for (int s = 0; s < 20; ++s) {
        RandomStream rng(1000 + s);
        const auto raw = sample_raw_degree_pairs(default_model(), 10000, rng);
        passes += !ks_discrete(raw.in, [](std::int64_t k) { return default_model().in_law().cdf(k); }).reject;
    }
    CHECK(passes >= 19);
}

TEST_CASE("rejection rate decreases with n") {
    int monotone = 0;
    for (int batch = 0; batch < 10; ++batch) {
        std::vector<double> rate;
        for (std::size_t n : {100u, 1000u, 10000u}) {
            std::uint64_t rounds = 0, runs = 300;
            for (std::uint64_t r = 0; r < runs; ++r) {
                RandomStream rng = RandomStream(batch).split(n * 1000 + r);
                rounds += run_iid_algorithm(default_model(), n, rng).rounds;
            }
            rate.push_back(1.0 - static_cast<double>(runs) / static_cast<double>(rounds));
        }
        monotone += rate[0] > rate[1] && rate[1] > rate[2];
    }
    CHECK(monotone >= 9);
}

TEST_CASE("assumption events") {
    auto seq = testing::make_sequence({2, 2, 2, 2}, {2, 2, 2, 2});
    AssumptionConstants k;
    k.nu = {2.0, 4.0, 4.0, std::pow(2.0, 2.25), 0.3};
    k.H = 1.7;
    k.c = 0.3;
    k.gamma = 0.2;
    k.kappa = 0.25;
    auto rep = check_assumption_events(seq, k);
    CHECK(rep.events[0]);
    CHECK(rep.overall);
    CHECK(rep.mu == 2.0);
    CHECK(rep.rho == doctest::Approx(0.3));
    seq.weight[1] = 0.75;  // |C| D = 1.5
    rep = check_assumption_events(seq, k);
    CHECK_FALSE(rep.events[4]);
    CHECK_FALSE(rep.overall);
}

TEST_CASE("limit constants and the iid output") {
    const auto k = iid_limit_constants(default_model());
    CHECK(k.nu[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(k.nu[1] == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(k.nu[4] == doctest::Approx(0.3).epsilon(1e-12));  // D >= 1 always
    CHECK(k.H == doctest::Approx(1.7));
    int ok_small = 0, ok_large = 0;
    for (int s = 0; s < 10; ++s) {
        RandomStream a(100 + s), b(200 + s);
        ok_small += check_assumption_events(run_iid_algorithm(default_model(), 1000, a).sequence, k).overall;
        ok_large += check_assumption_events(run_iid_algorithm(default_model(), 100000, b).sequence, k).overall;
    }
    MESSAGE("assumption events held in " << ok_small << "/10 at n=1e3 and " << ok_large << "/10 at n=1e5");
    CHECK(ok_large >= ok_small);
}

}
