#include "dcmrank/degree_law.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dcmrank {

ZetaPoissonLaw::ZetaPoissonLaw(double zeta_exponent, double poisson_rate, std::size_t cutoff)
    : zeta_(zeta_exponent, cutoff), rate_(poisson_rate) {
    if (!(poisson_rate >= 0.0) || !std::isfinite(poisson_rate))
        throw InvalidParameter("Poisson rate must be finite and >= 0");
    if (zeta_exponent > 2.0)
        size_biased_zeta_ = std::make_unique<ZetaDistribution>(zeta_exponent - 1.0, cutoff);
    if (rate_ > 0.0) poisson_param_ = std::poisson_distribution<std::int64_t>::param_type(rate_);
}

std::int64_t ZetaPoissonLaw::sample_poisson(RandomStream& rng) const {
    if (rate_ == 0.0) return 0;
    std::poisson_distribution<std::int64_t> poisson(poisson_param_);
    return poisson(rng);
}

std::int64_t ZetaPoissonLaw::sample(RandomStream& rng) const {
    const std::int64_t x = zeta_(rng);
    return x + sample_poisson(rng);
}

std::int64_t ZetaPoissonLaw::sample_size_biased(RandomStream& rng) const {
    // k P(X + Y = k) = E[X 1(X+Y=k)] + E[Y 1(X+Y=k)]: size-bias one addend, chosen
    // in proportion to its mean. Size-biased Zeta(s) is Zeta(s-1); size-biased
    // Poisson(l) is 1 + Poisson(l).
    if (!size_biased_zeta_)
        throw InvalidParameter("size-biased zeta law needs exponent > 2 (finite mean)");
    const double zeta_mean = zeta_.mean();
    if (rng.uniform() * (zeta_mean + rate_) < zeta_mean) {
        const std::int64_t x = (*size_biased_zeta_)(rng);
        return x + sample_poisson(rng);
    }
    const std::int64_t x = zeta_(rng);
    return x + 1 + sample_poisson(rng);
}

double ZetaPoissonLaw::poisson_pmf(std::int64_t y) const {
    if (rate_ == 0.0) return y == 0 ? 1.0 : 0.0;
    const auto yd = static_cast<double>(y);
    return std::exp(-rate_ + yd * std::log(rate_) - std::lgamma(yd + 1.0));
}

std::int64_t ZetaPoissonLaw::poisson_support_end() const {
    if (rate_ == 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(rate_ + 20.0 * std::sqrt(rate_) + 30.0));
}

double ZetaPoissonLaw::pmf(std::int64_t k) const {
    double sum = 0.0;
    const std::int64_t end = std::min(k - 1, poisson_support_end());
    for (std::int64_t y = 0; y <= end; ++y) sum += poisson_pmf(y) * zeta_.pmf(k - y);
    return sum;
}

double ZetaPoissonLaw::cdf(std::int64_t k) const {
    double sum = 0.0;
    const std::int64_t end = std::min(k - 1, poisson_support_end());
    for (std::int64_t y = 0; y <= end; ++y) sum += poisson_pmf(y) * zeta_.cdf(k - y);
    return std::min(sum, 1.0);
}

double ZetaPoissonLaw::mean() const { return zeta_.mean() + rate_; }

double ZetaPoissonLaw::moment(double p) const {
    const double s = zeta_.exponent();
    if (!(p < s - 1.0)) return std::numeric_limits<double>::infinity();
    constexpr int kExplicit = 20000;
    const double tail_start = kExplicit + 0.5;
    double total = 0.0;
    for (std::int64_t y = 0; y <= poisson_support_end(); ++y) {
        const double weight = poisson_pmf(y);
        if (weight == 0.0) continue;
        const auto yd = static_cast<double>(y);
        double inner = 0.0;
        for (int x = 1; x <= kExplicit; ++x) inner += std::pow(x + yd, p) * std::pow(x, -s);
        // midpoint-rule remainder: int_{M+1/2}^inf (x+y)^p x^{-s} dx, binomial series in y/x
        double binom = 1.0;
        for (int j = 0; j < 30; ++j) {
            const double term = binom * std::pow(yd, j) *
                                std::pow(tail_start, p - s - j + 1.0) / (s + j - p - 1.0);
            inner += term;
            if (y == 0 || std::abs(term) < 1e-17 * inner) break;
            binom *= (p - j) / (j + 1.0);
        }
        total += weight * inner;
    }
    return total / zeta_.normalizer();
}

std::string ZetaPoissonLaw::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "zeta(" << zeta_.exponent() << ")+poisson(" << rate_ << ")";
    return os.str();
}

double poisson_rate_for_mean(double tail_index, double target_mean) {
    if (!(tail_index > 1.0))
        throw InvalidParameter("tail index must exceed 1 for a finite mean");
    const double zeta_mean = riemann_zeta(tail_index) / riemann_zeta(tail_index + 1.0);
    const double rate = target_mean - zeta_mean;
    if (rate < 0.0) {
        std::ostringstream os;
        os << "target mean " << target_mean << " is below the zeta mean " << zeta_mean
           << " for tail index " << tail_index << " (negative Poisson rate)";
        throw InvalidParameter(os.str());
    }
    return rate;
}

FiniteDegreeLaw::FiniteDegreeLaw(std::vector<std::int64_t> values, std::vector<double> probabilities)
    : values_(std::move(values)), probabilities_(std::move(probabilities)) {
    if (values_.empty() || values_.size() != probabilities_.size())
        throw InvalidParameter("finite law needs matching nonempty values and probabilities");
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] < 0 || !(probabilities_[i] >= 0.0))
            throw InvalidParameter("finite law needs nonnegative values and probabilities");
        sum += probabilities_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("probabilities must sum to one");
    double running = 0.0, biased = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        running += probabilities_[i];
        biased += static_cast<double>(values_[i]) * probabilities_[i];
        cumulative_.push_back(running);
        size_biased_cumulative_.push_back(biased);
    }
    mean_ = biased;
}

std::int64_t FiniteDegreeLaw::sample(RandomStream& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::int64_t FiniteDegreeLaw::sample_size_biased(RandomStream& rng) const {
    if (!(mean_ > 0.0)) throw InvalidParameter("size-biasing a law with zero mean");
    const double u = rng.uniform() * size_biased_cumulative_.back();
    auto it = std::upper_bound(size_biased_cumulative_.begin(), size_biased_cumulative_.end(), u);
    if (it == size_biased_cumulative_.end()) --it;
    return values_[static_cast<std::size_t>(it - size_biased_cumulative_.begin())];
}

double FiniteDegreeLaw::pmf(std::int64_t k) const {
    double p = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] == k) p += probabilities_[i];
    return p;
}

double FiniteDegreeLaw::cdf(std::int64_t k) const {
    double p = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] <= k) p += probabilities_[i];
    return std::min(p, 1.0);
}

double FiniteDegreeLaw::moment(double p) const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] >= 1) m += std::pow(static_cast<double>(values_[i]), p) * probabilities_[i];
    return m;
}

std::string FiniteDegreeLaw::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "finite(";
    for (std::size_t i = 0; i < values_.size(); ++i)
        os << (i ? "," : "") << values_[i] << ":" << probabilities_[i];
    os << ")";
    return os.str();
}

} // namespace dcmrank
