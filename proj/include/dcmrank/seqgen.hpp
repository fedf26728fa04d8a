#pragma once

#include "dcmrank/degree_law.hpp"
#include "dcmrank/rng.hpp"
#include "dcmrank/scalar_law.hpp"
#include "dcmrank/sequence.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace dcmrank {

//! Heavy-tailed degree model: N = Zeta(alpha+1) + Poisson, D = Zeta(beta+1) + Poisson.
struct DegreeModelParams {
    double alpha = 1.5;        // in-degree tail index, > 1
    double beta = 2.5;         // out-degree tail index, > 2
    double target_mean = 2.0;  // E[N] = E[D]
    ScalarLaw damping = ScalarLaw::point(0.3);
    ScalarLaw personalization = ScalarLaw::point(0.7);
    //! Slack exponent in (0, kappa0); negative selects kappa0 / 2.
    double delta0 = -1.0;

    [[nodiscard]] double kappa0() const;
    [[nodiscard]] double effective_delta0() const;
    //! c with |zeta| <= c almost surely.
    [[nodiscard]] double damping_bound() const { return damping.sup_abs(); }

    //! Throws InvalidParameter.
    void validate() const;

    static DegreeModelParams pagerank(double alpha, double beta, double mean, double c) {
        DegreeModelParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.target_mean = mean;
        p.damping = ScalarLaw::point(c);
        p.personalization = ScalarLaw::point(1.0 - c);
        return p;
    }
};

//! Validated parameters together with the (table-backed) degree laws they induce.
class DegreeModel {
public:
    explicit DegreeModel(const DegreeModelParams& params);

    [[nodiscard]] const DegreeModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const ZetaPoissonLaw& in_law() const noexcept { return *in_law_; }
    [[nodiscard]] const ZetaPoissonLaw& out_law() const noexcept { return *out_law_; }
    [[nodiscard]] std::shared_ptr<const ZetaPoissonLaw> in_law_ptr() const noexcept { return in_law_; }
    [[nodiscard]] std::shared_ptr<const ZetaPoissonLaw> out_law_ptr() const noexcept { return out_law_; }

private:
    DegreeModelParams params_;
    std::shared_ptr<const ZetaPoissonLaw> in_law_;
    std::shared_ptr<const ZetaPoissonLaw> out_law_;
};

struct RawDegrees {
    std::vector<std::int64_t> in;
    std::vector<std::int64_t> out;
};

//! n independent draws of (N, D) before balancing.
RawDegrees sample_raw_degree_pairs(const DegreeModel& model, std::size_t n, RandomStream& rng);

struct IidAlgorithmResult {
    ExtendedBiDegreeSequence sequence;
    std::uint64_t rounds = 0;  // 1 + number of rejected draws
    std::int64_t imbalance = 0;  // accepted Delta_n = sum N - sum D
};

/**
 * Balanced degree sequence from i.i.d. draws.
 *
 * Redraws both degree vectors until |sum N - sum D| <= n^{1 - kappa0 + delta0},
 * then adds one stub to |Delta| distinct uniformly chosen nodes (in-stubs when
 * Delta < 0, out-stubs otherwise) and attaches i.i.d. personalization values
 * and weights C_i = zeta_i / D_i (c sgn(zeta_i) for D_i = 0).
 */
IidAlgorithmResult run_iid_algorithm(const DegreeModel& model, std::size_t n, RandomStream& rng);

//! Step 5 of the construction on fixed raw degrees; exposed for testing.
void repair_imbalance(RawDegrees& raw, RandomStream& rng);

//! Step 7 weight rule.
double weight_from_damping(double zeta, std::int64_t out_degree, double damping_bound);

//! |Delta_n| acceptance threshold n^{1 - kappa0 + delta0}.
double imbalance_threshold(const DegreeModelParams& params, std::size_t n);

struct AssumptionConstants {
    std::array<double, 5> nu{};  // nu_1 .. nu_5
    double H = 0.0;
    double c = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
};

struct AssumptionReport {
    std::array<double, 5> nu{};
    double mu = 0.0;      // nu_2 / nu_1
    double lambda = 0.0;  // nu_3 / nu_1
    double rho = 0.0;     // nu_5 mu / nu_1
    double H = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    std::array<bool, 6> events{};  // Omega_{n,1} .. Omega_{n,6}
    bool overall = false;
};

//! Evaluates the six regularity events literally against the given constants.
AssumptionReport check_assumption_events(const ExtendedBiDegreeSequence& seq,
                                         const AssumptionConstants& constants);

/**
 * Limit constants of the i.i.d. construction: nu_1 = E[D], nu_2 = E[D]^2,
 * nu_3 = E[D^2], nu_4 = E[D^{2+kappa}], nu_5 = E|zeta| P(D >= 1), H = E|Q| + 1.
 * Non-positive kappa/gamma select the midpoints of their admissible ranges.
 */
AssumptionConstants iid_limit_constants(const DegreeModel& model, double kappa = -1.0,
                                        double gamma = -1.0);

} // namespace dcmrank
