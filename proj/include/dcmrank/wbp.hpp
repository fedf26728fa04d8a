#pragma once

#include "dcmrank/coupling.hpp"
#include "dcmrank/degree_law.hpp"
#include "dcmrank/rng.hpp"
#include "dcmrank/scalar_law.hpp"
#include "dcmrank/seqgen.hpp"
#include "dcmrank/sequence.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dcmrank {

//! Attributes of one branching-process individual; `weight` labels the edge to its parent.
struct NodeDraw {
    std::int64_t offspring = 0;
    double personalization = 0.0;
    double weight = 0.0;
};

//! Law of the edge weight C, either given directly or as zeta / D~ with D~ size-biased.
class WeightLaw {
public:
    static WeightLaw direct(ScalarLaw law);
    static WeightLaw size_biased(std::shared_ptr<const DegreeLaw> out_degree, ScalarLaw damping);

    double operator()(RandomStream& rng) const;
    [[nodiscard]] double mean() const;
    //! E|C|^p
    [[nodiscard]] double abs_moment(double p) const;
    [[nodiscard]] double mean_abs() const { return abs_moment(1.0); }
    [[nodiscard]] std::string describe() const;

private:
    WeightLaw() = default;
    ScalarLaw scalar_;
    std::shared_ptr<const DegreeLaw> out_degree_;  // null for direct laws
};

//! C = zeta / D~, P(D~ = k) = k P(D = k) / E[D].
double sample_limit_weight(const DegreeLaw& out_degree, const ScalarLaw& damping, RandomStream& rng);

class RootLaw {
public:
    virtual ~RootLaw() = default;
    //! (N_0, Q_0); the weight field is unused.
    virtual NodeDraw draw(RandomStream& rng) const = 0;
    [[nodiscard]] virtual double mean_offspring() const = 0;
    [[nodiscard]] virtual double mean_personalization() const = 0;
    [[nodiscard]] virtual std::string describe() const = 0;
};

class BranchingLaw {
public:
    virtual ~BranchingLaw() = default;
    virtual NodeDraw draw(RandomStream& rng) const = 0;
    [[nodiscard]] virtual double mean_offspring() const = 0;
    [[nodiscard]] virtual double mean_weight() const = 0;
    //! E|C|^p
    [[nodiscard]] virtual double weight_abs_moment(double p) const = 0;
    [[nodiscard]] virtual double mean_personalization() const = 0;
    [[nodiscard]] virtual double mean_abs_personalization() const = 0;
    //! Whether C is independent of (N, Q).
    [[nodiscard]] virtual bool product_form() const = 0;
    [[nodiscard]] virtual std::string describe() const = 0;

    [[nodiscard]] double mean_abs_weight() const { return weight_abs_moment(1.0); }
    //! E[N] E|C|; the endogenous solution is only sampled when this is below one.
    [[nodiscard]] virtual double rho() const { return mean_offspring() * mean_abs_weight(); }
    [[nodiscard]] double rho_alpha(double alpha) const { return mean_offspring() * weight_abs_moment(alpha); }
};

class ProductRootLaw final : public RootLaw {
public:
    ProductRootLaw(std::shared_ptr<const DegreeLaw> offspring, ScalarLaw personalization);
    NodeDraw draw(RandomStream& rng) const override;
    [[nodiscard]] double mean_offspring() const override { return offspring_->mean(); }
    [[nodiscard]] double mean_personalization() const override { return personalization_.mean(); }
    [[nodiscard]] std::string describe() const override;

private:
    std::shared_ptr<const DegreeLaw> offspring_;
    ScalarLaw personalization_;
};

//! (N, Q) with independent marginals and C independent of both.
class ProductBranchingLaw final : public BranchingLaw {
public:
    ProductBranchingLaw(std::shared_ptr<const DegreeLaw> offspring, ScalarLaw personalization,
                        WeightLaw weight);
    NodeDraw draw(RandomStream& rng) const override;
    [[nodiscard]] double mean_offspring() const override { return offspring_->mean(); }
    [[nodiscard]] double mean_weight() const override { return weight_.mean(); }
    [[nodiscard]] double weight_abs_moment(double p) const override { return weight_.abs_moment(p); }
    [[nodiscard]] double mean_personalization() const override { return personalization_.mean(); }
    [[nodiscard]] double mean_abs_personalization() const override { return personalization_.mean_abs(); }
    [[nodiscard]] bool product_form() const override { return true; }
    [[nodiscard]] std::string describe() const override;
    [[nodiscard]] double rho() const override { return rho_; }

private:
    std::shared_ptr<const DegreeLaw> offspring_;
    ScalarLaw personalization_;
    WeightLaw weight_;
    double rho_ = 0.0;
};

//! Uniformly chosen row (N_i, Q_i) of a sequence.
class EmpiricalRootLaw final : public RootLaw {
public:
    explicit EmpiricalRootLaw(std::shared_ptr<const ExtendedBiDegreeSequence> seq);
    NodeDraw draw(RandomStream& rng) const override;
    [[nodiscard]] double mean_offspring() const override;
    [[nodiscard]] double mean_personalization() const override;
    [[nodiscard]] std::string describe() const override { return "empirical-uniform"; }

private:
    std::shared_ptr<const ExtendedBiDegreeSequence> seq_;
};

enum class EmpiricalForm {
    Joint,    // (N, Q, C) of one row chosen proportionally to D
    Product,  // (N, Q) and C taken from two independently size-biased rows
};

class EmpiricalBranchingLaw final : public BranchingLaw {
public:
    EmpiricalBranchingLaw(std::shared_ptr<const ExtendedBiDegreeSequence> seq, EmpiricalForm form);
    NodeDraw draw(RandomStream& rng) const override;
    [[nodiscard]] double mean_offspring() const override;
    [[nodiscard]] double mean_weight() const override;
    [[nodiscard]] double weight_abs_moment(double p) const override;
    [[nodiscard]] double mean_personalization() const override;
    [[nodiscard]] double mean_abs_personalization() const override;
    [[nodiscard]] bool product_form() const override { return form_ == EmpiricalForm::Product; }
    [[nodiscard]] std::string describe() const override;
    [[nodiscard]] double rho() const override { return rho_; }

    //! Row owning a uniformly chosen outbound stub.
    [[nodiscard]] std::size_t draw_row(RandomStream& rng) const;

private:
    template <class F>
    [[nodiscard]] double size_biased_mean(F&& f) const;

    std::shared_ptr<const ExtendedBiDegreeSequence> seq_;
    EmpiricalForm form_;
    std::vector<std::int64_t> cumulative_out_;
    double rho_ = 0.0;
};

struct LimitLaws {
    std::shared_ptr<const RootLaw> root;
    std::shared_ptr<const BranchingLaw> branching;
};

//! Limits of the i.i.d. construction: N_0 and N share the in-degree law, C = zeta / D~.
LimitLaws analytic_limit_laws(const DegreeModel& model);

//! Root: uniform row; branching: rows sampled proportionally to out-degree.
LimitLaws empirical_branching_laws(const ExtendedBiDegreeSequence& seq,
                                   EmpiricalForm form = EmpiricalForm::Joint);

/**
 * Root rank of the first `k` generations of a thorny tree: leaves at
 * generation k take the value r0 and every other node sums C^ R^ over its
 * children plus Q^. Evaluated bottom-up. k < 0 selects the tree depth.
 */
double tbt_root_rank(const ThornyTree& tree, double r0, int k = -1);
//! Same value via sum_{gen k} Pi^ r0 + sum_{s<k} sum_{gen s} Pi^ Q^.
double tbt_root_rank_weighted_sum(const ThornyTree& tree, double r0, int k = -1);

inline constexpr std::size_t kDefaultPopulationCap = 100'000'000;

/**
 * One draw of the endogenous solution truncated after `k` generations:
 * sum_{s<k} sum_{i in A_s} Pi_i Q_i + sum_{i in A_k} Pi_i r_leaf.
 * The tree is generated depth-first and never stored. Refuses rho >= 1;
 * throws PopulationCapExceeded past `max_nodes` individuals.
 */
double sample_endogenous(const BranchingLaw& law, int k, double r_leaf, RandomStream& rng,
                         std::size_t max_nodes = kDefaultPopulationCap);

//! sum_{i <= N_0} C_i R_i + Q_0 with R_i endogenous draws truncated at k - 1 generations.
double sample_r_star(const LimitLaws& laws, int k, RandomStream& rng, double r_leaf = 0.0,
                     std::size_t max_nodes = kDefaultPopulationCap);

//! Bound on |E[truncated draw] - E[R]|: (|r_leaf| + E|Q| / (1 - rho)) rho^k.
double truncation_bound(const BranchingLaw& law, int k, double r_leaf);

} // namespace dcmrank
