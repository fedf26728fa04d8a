#include "dcmrank/stats.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmrank {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
        if (std::isnan(v)) throw InvalidParameter("empirical distribution with a NaN value");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
    if (values_.empty()) throw InvalidParameter("cdf of an empty sample");
    const auto hits = std::upper_bound(values_.begin(), values_.end(), x) - values_.begin();
    return static_cast<double>(hits) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double p) const {
    if (values_.empty()) throw InvalidParameter("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("quantile level outside [0, 1]");
    const auto m = static_cast<double>(values_.size());
    auto idx = static_cast<std::size_t>(std::ceil(p * m));
    idx = idx == 0 ? 0 : idx - 1;
    return values_[std::min(idx, values_.size() - 1)];
}

double EmpiricalDistribution::mean() const {
    if (values_.empty()) throw InvalidParameter("mean of an empty sample");
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
}

double EmpiricalDistribution::standard_error() const {
    if (values_.size() < 2) throw InvalidParameter("standard error needs two values");
    const double mu = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - mu) * (v - mu);
    const auto m = static_cast<double>(values_.size());
    return std::sqrt(ss / (m - 1.0) / m);
}

double kr_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    if (a.empty() || b.empty()) throw InvalidParameter("KR distance of an empty sample");
    const auto& x = a.sorted_values();
    const auto& y = b.sorted_values();
    if (x.size() == y.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
        return s / static_cast<double>(x.size());
    }
    // integral of |F_a - F_b| between consecutive merged support points
    const double ma = static_cast<double>(x.size()), mb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double prev = std::min(x[0], y[0]);
    double total = 0.0;
    while (i < x.size() || j < y.size()) {
        const double next = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
        total += std::abs(static_cast<double>(i) / ma - static_cast<double>(j) / mb) * (next - prev);
        while (i < x.size() && x[i] == next) ++i;
        while (j < y.size() && y[j] == next) ++j;
        prev = next;
    }
    return total;
}

double sorted_mse(const EmpiricalDistribution& a, const EmpiricalDistribution& b, MseForm form) {
    if (a.count() != b.count()) throw InvalidParameter("sorted MSE needs batches of equal size");
    if (a.count() < 2) throw InvalidParameter("sorted MSE needs at least two values per batch");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < a.count(); ++i) {
        const double d = a[i] - b[i];
        s += form == MseForm::Squared ? d * d : d;
    }
    return s / static_cast<double>(a.count());
}

TailPrediction tail_constant(const TailInputs& in, TailCase tail_case) {
    if (!(std::max(in.rho, in.rho_alpha) < 1.0)) {
        std::ostringstream os;
        os << "tail prediction needs max(rho, rho_alpha) < 1, got rho = " << in.rho
           << ", rho_alpha = " << in.rho_alpha;
        throw InvalidParameter(os.str());
    }
    if (!(in.alpha > 0.0)) throw InvalidParameter("tail index must be positive");
    TailPrediction out{tail_case, in.alpha, in.rho, in.rho_alpha, in.kappa, 0.0};
    const double head = in.mean_root_offspring * in.weight_alpha_moment + in.kappa * (1.0 - in.rho_alpha);
    if (tail_case == TailCase::NDominant) {
        out.prefactor = head * std::pow(in.mean_personalization * in.mean_weight, in.alpha) /
                        (std::pow(1.0 - in.rho, in.alpha) * (1.0 - in.rho_alpha));
    } else {
        out.prefactor = head / (1.0 - in.rho_alpha);
    }
    if (!(out.prefactor > 0.0) || !std::isfinite(out.prefactor))
        throw InvalidParameter("tail prefactor is not a positive finite number for these inputs");
    return out;
}

double tail_index_estimate(const EmpiricalDistribution& samples, double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction <= 0.2))
        throw InvalidParameter("Hill top fraction must lie in (0, 0.2]");
    const std::size_t m = samples.count();
    const auto k = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(m)));
    if (k < 10 || k >= m) throw InvalidParameter("Hill estimator needs at least 10 upper order statistics");
    const double threshold = samples[m - k - 1];
    if (!(threshold > 0.0)) throw InvalidParameter("Hill estimator needs positive upper order statistics");
    double s = 0.0;
    for (std::size_t i = m - k; i < m; ++i) s += std::log(samples[i] / threshold);
    if (!(s > 0.0)) throw InvalidParameter("Hill estimator: all upper log-spacings are zero");
    return static_cast<double>(k) / s;
}

std::vector<std::pair<double, double>> ecdf_table(const EmpiricalDistribution& samples,
                                                  std::span<const double> grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double x : grid) out.emplace_back(x, samples.cdf(x));
    return out;
}

namespace {
constexpr double kKsCoefficient = 1.628;  // 1% level
}

KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    if (a.empty() || b.empty()) throw InvalidParameter("KS test of an empty sample");
    const auto& x = a.sorted_values();
    const auto& y = b.sorted_values();
    const double ma = static_cast<double>(x.size()), mb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        const double next = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
        while (i < x.size() && x[i] == next) ++i;
        while (j < y.size() && y[j] == next) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / ma - static_cast<double>(j) / mb));
    }
    KsResult r;
    r.statistic = d;
    r.critical = kKsCoefficient * std::sqrt((ma + mb) / (ma * mb));
    r.reject = d > r.critical;
    return r;
}

KsResult ks_discrete(std::span<const std::int64_t> sample, const std::function<double(std::int64_t)>& cdf) {
    if (sample.empty()) throw InvalidParameter("KS test of an empty sample");
    std::vector<std::int64_t> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double m = static_cast<double>(s.size());
    // F_n is flat between distinct sample values, so the supremum sits at a gap endpoint
    double d = cdf(s.front() - 1);
    std::size_t i = 0;
    while (i < s.size()) {
        const std::int64_t v = s[i];
        while (i < s.size() && s[i] == v) ++i;
        const double fn = static_cast<double>(i) / m;
        d = std::max(d, std::abs(fn - cdf(v)));
        if (i < s.size() && s[i] > v + 1) d = std::max(d, std::abs(fn - cdf(s[i] - 1)));
    }
    KsResult r;
    r.statistic = d;
    r.critical = kKsCoefficient / std::sqrt(m);
    r.reject = d > r.critical;
    return r;
}

} // namespace dcmrank
