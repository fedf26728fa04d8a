#pragma once

#include "dcmrank/rng.hpp"
#include "dcmrank/zeta.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace dcmrank {

//! Law of a nonnegative integer degree.
class DegreeLaw {
public:
    virtual ~DegreeLaw() = default;

    virtual std::int64_t sample(RandomStream& rng) const = 0;
    //! Draw from the size-biased law P(X~ = k) = k P(X = k) / E[X].
    virtual std::int64_t sample_size_biased(RandomStream& rng) const = 0;

    [[nodiscard]] virtual double pmf(std::int64_t k) const = 0;
    [[nodiscard]] virtual double cdf(std::int64_t k) const = 0;
    [[nodiscard]] virtual double mean() const = 0;
    //! sum_{k >= 1} k^p P(X = k); the k = 0 atom is excluded so negative p is allowed.
    [[nodiscard]] virtual double moment(double p) const = 0;
    [[nodiscard]] virtual std::string describe() const = 0;

    [[nodiscard]] double survival(std::int64_t k) const { return 1.0 - cdf(k); }
};

/**
 * X + Y with X ~ Zeta(s) and Y ~ Poisson(lambda) independent.
 *
 * The Poisson addend is light-tailed, so P(X + Y > x) is regularly varying
 * with index 1 - s, and its rate shifts the mean without changing the tail.
 */
class ZetaPoissonLaw final : public DegreeLaw {
public:
    ZetaPoissonLaw(double zeta_exponent, double poisson_rate,
                   std::size_t cutoff = ZetaDistribution::kDefaultCutoff);

    std::int64_t sample(RandomStream& rng) const override;
    std::int64_t sample_size_biased(RandomStream& rng) const override;
    [[nodiscard]] double pmf(std::int64_t k) const override;
    [[nodiscard]] double cdf(std::int64_t k) const override;
    [[nodiscard]] double mean() const override;
    [[nodiscard]] double moment(double p) const override;
    [[nodiscard]] std::string describe() const override;

    [[nodiscard]] double zeta_exponent() const noexcept { return zeta_.exponent(); }
    [[nodiscard]] double poisson_rate() const noexcept { return rate_; }

private:
    std::int64_t sample_poisson(RandomStream& rng) const;
    [[nodiscard]] double poisson_pmf(std::int64_t y) const;
    [[nodiscard]] std::int64_t poisson_support_end() const;

    ZetaDistribution zeta_;
    std::unique_ptr<ZetaDistribution> size_biased_zeta_;  // Zeta(s-1), present when s > 2
    double rate_;
    std::poisson_distribution<std::int64_t>::param_type poisson_param_;
};

//! Law with finite support given by (value, probability) pairs.
class FiniteDegreeLaw final : public DegreeLaw {
public:
    FiniteDegreeLaw(std::vector<std::int64_t> values, std::vector<double> probabilities);

    static FiniteDegreeLaw point(std::int64_t value) { return FiniteDegreeLaw({value}, {1.0}); }

    std::int64_t sample(RandomStream& rng) const override;
    std::int64_t sample_size_biased(RandomStream& rng) const override;
    [[nodiscard]] double pmf(std::int64_t k) const override;
    [[nodiscard]] double cdf(std::int64_t k) const override;
    [[nodiscard]] double mean() const override { return mean_; }
    [[nodiscard]] double moment(double p) const override;
    [[nodiscard]] std::string describe() const override;

private:
    std::vector<std::int64_t> values_;
    std::vector<double> probabilities_;
    std::vector<double> cumulative_;
    std::vector<double> size_biased_cumulative_;
    double mean_ = 0.0;
};

//! Poisson rate that lifts Zeta(tail_index + 1) to the requested mean; throws when negative.
double poisson_rate_for_mean(double tail_index, double target_mean);

} // namespace dcmrank
