#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dcmrank {

class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    //! Sorts the values; NaN is rejected.
    explicit EmpiricalDistribution(std::vector<double> values);

    [[nodiscard]] std::size_t count() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] const std::vector<double>& sorted_values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    //! #{values <= x} / m
    [[nodiscard]] double cdf(double x) const;
    //! Lower empirical quantile: smallest value v with F(v) >= p.
    [[nodiscard]] double quantile(double p) const;
    [[nodiscard]] double mean() const;
    //! Standard error of the mean (sample standard deviation / sqrt m).
    [[nodiscard]] double standard_error() const;

private:
    std::vector<double> values_;
};

//! Kantorovich-Rubinstein (Wasserstein-1) distance between two empirical laws on the line.
double kr_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

enum class MseForm {
    Squared,
    Unsquared,  // sum of signed differences, as printed in the experiment's formula
};

/**
 * Sorted-sample comparison: sum over the m - 1 lowest ranked pairs of
 * (a_(i) - b_(i))^2, divided by m. The pair of maxima is dropped.
 */
double sorted_mse(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                  MseForm form = MseForm::Squared);

enum class TailCase {
    NDominant,  // P(R* > x) ~ prefactor P(N > x)
    QDominant,  // P(R* > x) ~ prefactor P(Q > x)
};

struct TailInputs {
    double mean_root_offspring = 0.0;  // E[N_0]
    double weight_alpha_moment = 0.0;  // E[C^alpha]
    double kappa = 1.0;                // lim P(N_0 > x) / P(N > x), or the Q analogue
    double rho = 0.0;                  // E[N] E[C]
    double rho_alpha = 0.0;            // E[N] E[C^alpha]
    double mean_personalization = 0.0; // E[Q]
    double mean_weight = 0.0;          // E[C]
    double alpha = 0.0;
};

struct TailPrediction {
    TailCase tail_case = TailCase::NDominant;
    double alpha = 0.0;
    double rho = 0.0;
    double rho_alpha = 0.0;
    double kappa = 0.0;
    double prefactor = 0.0;
};

//! Refuses (InvalidParameter) unless max(rho, rho_alpha) < 1 and the prefactor is positive.
TailPrediction tail_constant(const TailInputs& in, TailCase tail_case);

inline constexpr double kDefaultHillFraction = 0.05;

//! Hill estimator of the tail index over the top ceil(top_fraction m) order statistics.
double tail_index_estimate(const EmpiricalDistribution& samples,
                           double top_fraction = kDefaultHillFraction);

std::vector<std::pair<double, double>> ecdf_table(const EmpiricalDistribution& samples,
                                                  std::span<const double> grid);

struct KsResult {
    double statistic = 0.0;
    double critical = 0.0;  // at the 1% level
    bool reject = false;
};

//! Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

//! One-sample KS test of integer data against an integer-supported CDF (conservative critical value).
KsResult ks_discrete(std::span<const std::int64_t> sample,
                     const std::function<double(std::int64_t)>& cdf);

} // namespace dcmrank
