#include "helpers.hpp"

#include "dcmrank/degree_law.hpp"
#include "dcmrank/errors.hpp"
#include "dcmrank/scalar_law.hpp"

#include <doctest.h>

#include <cmath>

using namespace dcmrank;

TEST_SUITE("degree_law") {

TEST_CASE("poisson rates for the experiment parameters") {
    const double lin = 2.0 - testing::series_zeta(1.5) / testing::series_zeta(2.5);
    const double lout = 2.0 - testing::series_zeta(2.5) / testing::series_zeta(3.5);
    CHECK(lin == doctest::Approx(0.0526).epsilon(2e-3));
    CHECK(lout == doctest::Approx(0.8094).epsilon(1e-4));
    CHECK(poisson_rate_for_mean(1.5, 2.0) == doctest::Approx(lin).epsilon(1e-9));
    CHECK(poisson_rate_for_mean(2.5, 2.0) == doctest::Approx(lout).epsilon(1e-9));
    CHECK_THROWS_AS(poisson_rate_for_mean(1.5, 1.5), InvalidParameter);
}

TEST_CASE("zeta plus poisson pmf, cdf and mean") {
    ZetaPoissonLaw law(3.5, 0.8);
    double total = 0.0, mean = 0.0;
    for (std::int64_t k = 0; k <= 20000; ++k) {
        const double p = law.pmf(k);
        total += p;
        mean += static_cast<double>(k) * p;
    }
    CHECK(law.pmf(0) == 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(law.cdf(50) == doctest::Approx([&] { double s = 0; for (int k = 0; k <= 50; ++k) s += law.pmf(k); return s; }()).epsilon(1e-12));
    CHECK(law.mean() == doctest::Approx(testing::series_zeta(2.5) / testing::series_zeta(3.5) + 0.8).epsilon(1e-9));
    CHECK(mean == doctest::Approx(law.mean()).epsilon(1e-4));
}

TEST_CASE("moments by series against direct summation") {
    ZetaPoissonLaw law(3.5, 0.8);
    for (double p : {0.0, 0.5, 1.0, 2.0}) {
        double direct = 0.0;
        for (std::int64_t k = 1; k <= 200000; ++k) direct += std::pow(static_cast<double>(k), p) * law.pmf(k);
        CAPTURE(p);
        CHECK(law.moment(p) == doctest::Approx(direct).epsilon(p >= 2.0 ? 5e-3 : 1e-6));
    }
    CHECK(std::isinf(law.moment(2.5)));
    CHECK(law.moment(1.0) == doctest::Approx(law.mean()).epsilon(1e-9));
}

TEST_CASE("size-biased sampling matches k P(k) / mean") {
    ZetaPoissonLaw law(3.5, 0.8);
    RandomStream rng(9);
    const int draws = 400'000;
    std::vector<int> counts(8, 0);
    for (int i = 0; i < draws; ++i) {
        const auto k = law.sample_size_biased(rng);
        REQUIRE(k >= 1);
        if (k < 8) ++counts[static_cast<std::size_t>(k)];
    }
    for (int k = 1; k < 8; ++k) {
        const double p = k * law.pmf(k) / law.mean();
        const double f = counts[static_cast<std::size_t>(k)] / static_cast<double>(draws);
        CAPTURE(k);
        CHECK(std::abs(f - p) <= 4.0 * std::sqrt(p * (1 - p) / draws));
    }
}

TEST_CASE("finite law and its size-biased version") {
    FiniteDegreeLaw law({1, 2}, {0.5, 0.5});
    CHECK(law.mean() == doctest::Approx(1.5));
    RandomStream rng(1);
    int twos = 0;
    for (int i = 0; i < 300'000; ++i) twos += law.sample_size_biased(rng) == 2;
    CHECK(twos / 300'000.0 == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK_THROWS(FiniteDegreeLaw::point(0).sample_size_biased(rng));
}

TEST_CASE("scalar laws") {
    const auto u = ScalarLaw::uniform(-0.2, 0.4);
    CHECK(u.mean() == doctest::Approx(0.1));
    CHECK(u.sup_abs() == doctest::Approx(0.4));
    CHECK(u.mean_abs() == doctest::Approx((0.04 + 0.16) / 2 / 0.6));
    CHECK(ScalarLaw::point(-0.3).mean_abs() == doctest::Approx(0.3));
    CHECK_THROWS_AS(ScalarLaw::uniform(1.0, 0.0), InvalidParameter);
}

}
