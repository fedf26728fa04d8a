#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dcmrank {

using NodeId = std::uint32_t;

/**
 * Per-node in-degree N, out-degree D, weight C and personalization Q.
 *
 * A sequence is wirable into a directed multigraph exactly when
 * sum N == sum D (the common value is the stub count L_n).
 */
struct ExtendedBiDegreeSequence {
    std::vector<std::int64_t> in_degree;
    std::vector<std::int64_t> out_degree;
    std::vector<double> weight;
    std::vector<double> personalization;

    [[nodiscard]] std::size_t size() const noexcept { return in_degree.size(); }
    [[nodiscard]] std::int64_t total_in() const noexcept;
    [[nodiscard]] std::int64_t total_out() const noexcept;
    [[nodiscard]] bool is_balanced() const noexcept { return total_in() == total_out(); }
    //! L_n; only meaningful for balanced sequences.
    [[nodiscard]] std::int64_t total_stubs() const noexcept { return total_out(); }
    //! max_i |C_i| D_i
    [[nodiscard]] double max_weight_load() const noexcept;

    //! Throws InvalidSequence on ragged columns, negative degrees or stub imbalance.
    void validate() const;

    bool operator==(const ExtendedBiDegreeSequence&) const = default;
};

} // namespace dcmrank
