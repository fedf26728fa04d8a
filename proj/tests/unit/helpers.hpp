#pragma once

#include "dcmrank/sequence.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace testing {

//! Zeta(s) by plain summation plus the integral and half-term corrections.
inline double series_zeta(double s, std::int64_t terms = 2'000'000) {
    long double sum = 0.0L;
    for (std::int64_t k = terms; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
    const long double K = static_cast<long double>(terms);
    sum += std::pow(K, 1.0L - s) / (s - 1.0L) - 0.5L * std::pow(K, -static_cast<long double>(s));
    return static_cast<double>(sum);
}

inline dcmrank::ExtendedBiDegreeSequence make_sequence(std::vector<std::int64_t> in, std::vector<std::int64_t> out,
                                                      double c = 0.3, double q = 0.7) {
    dcmrank::ExtendedBiDegreeSequence seq;
    seq.in_degree = std::move(in);
    seq.out_degree = std::move(out);
    for (auto d : seq.out_degree) {
        seq.weight.push_back(d > 0 ? c / static_cast<double>(d) : c);
        seq.personalization.push_back(q);
    }
    return seq;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

template <class V>
MeanSe mean_se(const V& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()))};
}

} // namespace testing
