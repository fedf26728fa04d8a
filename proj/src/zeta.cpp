#include "dcmrank/zeta.hpp"

#include "dcmrank/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace dcmrank {

namespace {

// B_{2j} / (2j)! for j = 1..8
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

constexpr std::uint64_t kEulerMaclaurinStart = 32;

double euler_maclaurin_tail(double s, double m) {
    double sum = std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s);
    // rising factorial s (s+1) ... (s+2j-2) times m^{-s-2j+1}
    double rising = s;
    double power = std::pow(m, -s - 1.0);
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        const double term = kBernoulliOverFactorial[j] * rising * power;
        sum += term;
        if (std::abs(term) < 1e-18 * sum) break;
        rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        power /= m * m;
    }
    return sum;
}

void validate_exponent(double s) {
    if (!(s > 1.0) || !std::isfinite(s))
        throw InvalidParameter("zeta exponent must be finite and > 1, got " + std::to_string(s));
}

} // namespace

double zeta_tail(double s, std::uint64_t first) {
    validate_exponent(s);
    if (first == 0) throw InvalidParameter("zeta_tail: first index must be >= 1");
    double head = 0.0;
    std::uint64_t k = first;
    for (; k < kEulerMaclaurinStart; ++k) head += std::pow(static_cast<double>(k), -s);
    return head + euler_maclaurin_tail(s, static_cast<double>(k));
}

double riemann_zeta(double s) { return zeta_tail(s, 1); }

ZetaDistribution::ZetaDistribution(double s, std::size_t cutoff) : s_(s) {
    validate_exponent(s);
    if (cutoff == 0) throw InvalidParameter("zeta sampler cutoff must be >= 1");
    if (cutoff > std::numeric_limits<std::uint32_t>::max())
        throw InvalidParameter("zeta sampler cutoff too large");
    mean_ = compute_mean(s);

    cumulative_.resize(cutoff);
    // Neumaier summation; the table is the CDF numerator and must not drift.
    double sum = 0.0, compensation = 0.0;
    for (std::size_t k = 1; k <= cutoff; ++k) {
        const double term = std::pow(static_cast<double>(k), -s);
        const double t = sum + term;
        compensation += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
        sum = t;
        cumulative_[k - 1] = sum + compensation;
    }
    total_ = cumulative_.back() + zeta_tail(s, cutoff + 1);

    constexpr std::size_t kGuideSize = 4096;
    guide_.resize(kGuideSize);
    std::size_t index = 0;
    for (std::size_t b = 0; b < kGuideSize; ++b) {
        const double threshold = total_ * static_cast<double>(b) / kGuideSize;
        while (index + 1 < cutoff && cumulative_[index] <= threshold) ++index;
        guide_[b] = static_cast<std::uint32_t>(index);
    }

    envelope_bound_ = std::pow(1.0 + 1.0 / (static_cast<double>(cutoff) + 1.0), s);
}

std::int64_t ZetaDistribution::operator()(RandomStream& rng) const {
    const double u = rng.uniform() * total_;
    if (u >= cumulative_.back()) return sample_tail(rng);
    auto bucket = static_cast<std::size_t>(u / total_ * static_cast<double>(guide_.size()));
    if (bucket >= guide_.size()) bucket = guide_.size() - 1;
    std::size_t index = guide_[bucket];
    while (cumulative_[index] <= u) ++index;
    return static_cast<std::int64_t>(index) + 1;
}

std::int64_t ZetaDistribution::sample_tail(RandomStream& rng) const {
    // Envelope: continuous density proportional to y^{-s} on [K+1, inf), k = floor(y).
    // P(floor(y) = k) is proportional to g(k) = int_k^{k+1} y^{-s} dy and the target
    // ratio k^{-s} / g(k) lies in [1, (1 + 1/k)^s].
    const double start = static_cast<double>(cumulative_.size()) + 1.0;
    constexpr double kMaxValue = 0x1.0p62;
    for (;;) {
        const double y = start * std::pow(rng.uniform_open(), -1.0 / (s_ - 1.0));
        if (!(y < kMaxValue)) continue;
        const double k = std::floor(y);
        const double ratio =
            (s_ - 1.0) / (k * -std::expm1((1.0 - s_) * std::log1p(1.0 / k)));
        if (rng.uniform() * envelope_bound_ <= ratio) return static_cast<std::int64_t>(k);
    }
}

double ZetaDistribution::pmf(std::int64_t k) const {
    if (k < 1) return 0.0;
    return std::pow(static_cast<double>(k), -s_) / total_;
}

double ZetaDistribution::cdf(std::int64_t k) const {
    if (k < 1) return 0.0;
    if (static_cast<std::size_t>(k) <= cumulative_.size())
        return cumulative_[static_cast<std::size_t>(k) - 1] / total_;
    return 1.0 - zeta_tail(s_, static_cast<std::uint64_t>(k) + 1) / total_;
}

double ZetaDistribution::compute_mean(double s) {
    if (s <= 2.0) return std::numeric_limits<double>::infinity();
    return riemann_zeta(s - 1.0) / riemann_zeta(s);
}

} // namespace dcmrank
