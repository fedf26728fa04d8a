#pragma once

#include "dcmrank/graph.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dcmrank {

struct RankingConfig {
    double r0 = 1.0;
    int max_k = 200;
    double tolerance = 1e-10;  // L2 stopping threshold on successive iterates
    double damping_bound = 0.3;

    //! Throws InvalidParameter.
    void validate() const;
};

struct RankVector {
    std::vector<double> values;
    int iterations = 0;
    //! (|r0| + mean|Q| / (1 - c)) c^k; zero for exact solves.
    double certified_error_bound = 0.0;
    double last_step_l2 = 0.0;
    double last_step_l1 = 0.0;
    //! || R M + Q - R ||_1 of the returned values.
    double residual_l1 = 0.0;
};

//! y = x M, i.e. y_j = sum over edges i -> j of C_i x_i, accumulated in edge order.
std::vector<double> apply_M_transpose(const DirectedMultigraph& graph, std::span<const double> x);
void apply_M_transpose(const DirectedMultigraph& graph, std::span<const double> x, std::span<double> y);

/**
 * Iterates R <- R M + Q from R = r0 * 1 until the L2 step falls below the
 * tolerance or max_k steps were taken.
 *
 * Refuses (CertificationError) when max_i |C_i| D_i exceeds the damping bound,
 * since the geometric error certificate then no longer holds.
 */
RankVector power_iteration(const DirectedMultigraph& graph, std::span<const double> personalization,
                           const RankingConfig& config);

//! Exactly `k` iterations from r0 * 1 (no stopping rule); certification as above.
RankVector fixed_iterations(const DirectedMultigraph& graph, std::span<const double> personalization,
                            double r0, int k, double damping_bound);

//! Dense Gaussian elimination with partial pivoting on (I - M^T) R^T = Q^T, n <= 5000.
RankVector solve_exact(const DirectedMultigraph& graph, std::span<const double> personalization);

//! (|r0| + mean_abs_q / (1 - c)) c^k
double error_bound(double r0, double c, double mean_abs_q, int k);

inline constexpr std::size_t kDenseSolveLimit = 5000;

} // namespace dcmrank
