#include "dcmrank/rank.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmrank {

void RankingConfig::validate() const {
    if (!(damping_bound > 0.0 && damping_bound < 1.0))
        throw InvalidParameter("damping bound must lie in (0, 1)");
    if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be > 0");
    if (max_k < 1) throw InvalidParameter("max_k must be >= 1");
}

void apply_M_transpose(const DirectedMultigraph& graph, std::span<const double> x, std::span<double> y) {
    const std::size_t n = graph.node_count();
    if (x.size() != n || y.size() != n) throw InvalidParameter("vector length does not match node count");
    std::fill(y.begin(), y.end(), 0.0);
    const auto& weight = graph.attributes.weight;
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
        const NodeId i = graph.source[e];
        y[graph.target[e]] += weight[i] * x[i];
    }
}

std::vector<double> apply_M_transpose(const DirectedMultigraph& graph, std::span<const double> x) {
    std::vector<double> y(graph.node_count());
    apply_M_transpose(graph, x, y);
    return y;
}

double error_bound(double r0, double c, double mean_abs_q, int k) {
    if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("error bound needs 0 < c < 1");
    return (std::abs(r0) + mean_abs_q / (1.0 - c)) * std::pow(c, k);
}

namespace {

void certify(const DirectedMultigraph& graph, double c) {
    const double load = graph.attributes.max_weight_load();
    if (load > c) {
        std::ostringstream os;
        os.precision(17);
        os << "max |C_i| D_i = " << load << " exceeds damping bound " << c;
        throw CertificationError(os.str());
    }
}

double mean_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double residual_l1(const DirectedMultigraph& graph, std::span<const double> q, std::span<const double> r) {
    std::vector<double> next(r.size());
    apply_M_transpose(graph, r, next);
    double res = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) res += std::abs(next[i] + q[i] - r[i]);
    return res;
}

RankVector iterate(const DirectedMultigraph& graph, std::span<const double> q, double r0, int max_k,
                   double tolerance, double c) {
    const std::size_t n = graph.node_count();
    if (q.size() != n) throw InvalidParameter("personalization length does not match node count");
    certify(graph, c);

    RankVector out;
    out.values.assign(n, r0);
    std::vector<double> next(n);
    for (int k = 1; k <= max_k; ++k) {
        apply_M_transpose(graph, out.values, next);
        double l2 = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] += q[i];
            const double step = next[i] - out.values[i];
            l2 += step * step;
            l1 += std::abs(step);
        }
        out.values.swap(next);
        out.iterations = k;
        out.last_step_l2 = std::sqrt(l2);
        out.last_step_l1 = l1;
        if (out.last_step_l2 < tolerance) break;
    }
    out.certified_error_bound = error_bound(r0, c, mean_abs(q), out.iterations);
    out.residual_l1 = residual_l1(graph, q, out.values);
    return out;
}

} // namespace

RankVector power_iteration(const DirectedMultigraph& graph, std::span<const double> personalization,
                           const RankingConfig& config) {
    config.validate();
    return iterate(graph, personalization, config.r0, config.max_k, config.tolerance,
                   config.damping_bound);
}

RankVector fixed_iterations(const DirectedMultigraph& graph, std::span<const double> personalization,
                            double r0, int k, double damping_bound) {
    if (k < 0) throw InvalidParameter("iteration count must be >= 0");
    if (!(damping_bound > 0.0 && damping_bound < 1.0))
        throw InvalidParameter("damping bound must lie in (0, 1)");
    if (k == 0) {
        if (personalization.size() != graph.node_count())
            throw InvalidParameter("personalization length does not match node count");
        certify(graph, damping_bound);
        RankVector out;
        out.values.assign(graph.node_count(), r0);
        out.certified_error_bound = error_bound(r0, damping_bound, mean_abs(personalization), 0);
        out.residual_l1 = residual_l1(graph, personalization, out.values);
        return out;
    }
    return iterate(graph, personalization, r0, k, 0.0, damping_bound);
}

RankVector solve_exact(const DirectedMultigraph& graph, std::span<const double> personalization) {
    const std::size_t n = graph.node_count();
    if (personalization.size() != n)
        throw InvalidParameter("personalization length does not match node count");
    if (n > kDenseSolveLimit) throw InvalidParameter("dense solve limited to 5000 nodes");

    // row j of A = I - M^T: A[j][i] = delta_ij - s_ij C_i
    std::vector<double> a(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j * n + j] = 1.0;
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
        const NodeId i = graph.source[e];
        a[graph.target[e] * n + i] -= graph.attributes.weight[i];
    }
    std::vector<double> b(personalization.begin(), personalization.end());

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300) throw CertificationError("singular rank system");
        if (pivot != col) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(col * n),
                             a.begin() + static_cast<std::ptrdiff_t>((col + 1) * n),
                             a.begin() + static_cast<std::ptrdiff_t>(pivot * n));
            std::swap(b[col], b[pivot]);
        }
        const double diag = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / diag;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    RankVector out;
    out.values.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * out.values[c];
        out.values[r] = s / a[r * n + r];
    }

    const std::vector<double> image = apply_M_transpose(graph, out.values);
    double residual = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        residual = std::max(residual, std::abs(out.values[r] - image[r] - personalization[r]));
    double q_max = 0.0;
    for (double q : personalization) q_max = std::max(q_max, std::abs(q));
    if (residual > 1e-10 * (1.0 + q_max)) throw CertificationError("dense solve residual too large");
    out.residual_l1 = residual_l1(graph, personalization, out.values);
    return out;
}

} // namespace dcmrank
