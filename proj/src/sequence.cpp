#include "dcmrank/sequence.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dcmrank {

std::int64_t ExtendedBiDegreeSequence::total_in() const noexcept {
    return std::accumulate(in_degree.begin(), in_degree.end(), std::int64_t{0});
}

std::int64_t ExtendedBiDegreeSequence::total_out() const noexcept {
    return std::accumulate(out_degree.begin(), out_degree.end(), std::int64_t{0});
}

double ExtendedBiDegreeSequence::max_weight_load() const noexcept {
    double load = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        load = std::max(load, std::abs(weight[i]) * static_cast<double>(out_degree[i]));
    return load;
}

void ExtendedBiDegreeSequence::validate() const {
    const std::size_t n = in_degree.size();
    if (out_degree.size() != n || weight.size() != n || personalization.size() != n)
        throw InvalidSequence("sequence columns have different lengths");
    for (std::size_t i = 0; i < n; ++i)
        if (in_degree[i] < 0 || out_degree[i] < 0)
            throw InvalidSequence("negative degree at node " + std::to_string(i));
    if (!is_balanced())
        throw InvalidSequence("stub imbalance: sum N = " + std::to_string(total_in()) +
                              ", sum D = " + std::to_string(total_out()));
}

} // namespace dcmrank
