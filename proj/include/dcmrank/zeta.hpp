#pragma once

#include "dcmrank/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dcmrank {

//! sum_{k >= first} k^{-s} for s > 1, by direct summation plus Euler-Maclaurin remainder.
double zeta_tail(double s, std::uint64_t first);

//! Riemann zeta function for real s > 1, relative error below 1e-12.
double riemann_zeta(double s);

/**
 * Exact sampler for the zeta law P(k) = k^{-s} / zeta(s), k = 1, 2, ...
 *
 * Values up to `cutoff` come from a tabulated inverse CDF (with a guide table
 * for O(1) expected lookup); the remaining mass is computed analytically and
 * sampled by rejection from a continuous Pareto envelope, so no probability
 * is truncated.
 */
class ZetaDistribution {
public:
    static constexpr std::size_t kDefaultCutoff = 1'000'000;

    explicit ZetaDistribution(double s, std::size_t cutoff = kDefaultCutoff);

    std::int64_t operator()(RandomStream& rng) const;

    [[nodiscard]] double exponent() const noexcept { return s_; }
    [[nodiscard]] double normalizer() const noexcept { return total_; }
    [[nodiscard]] std::size_t cutoff() const noexcept { return cumulative_.size(); }

    //! P(X = k)
    [[nodiscard]] double pmf(std::int64_t k) const;
    //! P(X <= k)
    [[nodiscard]] double cdf(std::int64_t k) const;
    //! zeta(s-1)/zeta(s); +inf when s <= 2.
    [[nodiscard]] double mean() const noexcept { return mean_; }

private:
    std::int64_t sample_tail(RandomStream& rng) const;
    static double compute_mean(double s);

    double s_;
    double total_;
    std::vector<double> cumulative_;  // cumulative_[i] = sum_{k <= i+1} k^{-s}
    std::vector<std::uint32_t> guide_;
    double envelope_bound_;
    double mean_;
};

} // namespace dcmrank
