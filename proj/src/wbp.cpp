#include "dcmrank/wbp.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcmrank {

WeightLaw WeightLaw::direct(ScalarLaw law) {
    WeightLaw w;
    w.scalar_ = law;
    return w;
}

WeightLaw WeightLaw::size_biased(std::shared_ptr<const DegreeLaw> out_degree, ScalarLaw damping) {
    if (!out_degree) throw InvalidParameter("size-biased weight law needs an out-degree law");
    if (!(out_degree->mean() > 0.0))
        throw InvalidParameter("out-degree law has zero mean; nothing to size-bias");
    WeightLaw w;
    w.scalar_ = damping;
    w.out_degree_ = std::move(out_degree);
    return w;
}

double WeightLaw::operator()(RandomStream& rng) const {
    if (!out_degree_) return scalar_(rng);
    return sample_limit_weight(*out_degree_, scalar_, rng);
}

double WeightLaw::mean() const {
    if (!out_degree_) return scalar_.mean();
    // E[1 / D~] = P(D >= 1) / E[D]
    return scalar_.mean() * out_degree_->moment(0.0) / out_degree_->mean();
}

double WeightLaw::abs_moment(double p) const {
    if (!out_degree_) return scalar_.abs_moment(p);
    // E[D~^{-p}] = E[D^{1-p}; D >= 1] / E[D]
    return scalar_.abs_moment(p) * out_degree_->moment(1.0 - p) / out_degree_->mean();
}

std::string WeightLaw::describe() const {
    if (!out_degree_) return scalar_.describe();
    return scalar_.describe() + "/sizebiased(" + out_degree_->describe() + ")";
}

double sample_limit_weight(const DegreeLaw& out_degree, const ScalarLaw& damping, RandomStream& rng) {
    if (!(out_degree.mean() > 0.0))
        throw InvalidParameter("out-degree law has zero mean; nothing to size-bias");
    const std::int64_t d = out_degree.sample_size_biased(rng);
    return damping(rng) / static_cast<double>(d);
}

ProductRootLaw::ProductRootLaw(std::shared_ptr<const DegreeLaw> offspring, ScalarLaw personalization)
    : offspring_(std::move(offspring)), personalization_(personalization) {
    if (!offspring_) throw InvalidParameter("root law needs an offspring law");
}

NodeDraw ProductRootLaw::draw(RandomStream& rng) const {
    NodeDraw d;
    d.offspring = offspring_->sample(rng);
    d.personalization = personalization_(rng);
    return d;
}

std::string ProductRootLaw::describe() const {
    return "N0~" + offspring_->describe() + ";Q0~" + personalization_.describe();
}

ProductBranchingLaw::ProductBranchingLaw(std::shared_ptr<const DegreeLaw> offspring,
                                         ScalarLaw personalization, WeightLaw weight)
    : offspring_(std::move(offspring)), personalization_(personalization), weight_(std::move(weight)) {
    if (!offspring_) throw InvalidParameter("branching law needs an offspring law");
    rho_ = offspring_->mean() * weight_.mean_abs();
}

NodeDraw ProductBranchingLaw::draw(RandomStream& rng) const {
    NodeDraw d;
    d.offspring = offspring_->sample(rng);
    d.personalization = personalization_(rng);
    d.weight = weight_(rng);
    return d;
}

std::string ProductBranchingLaw::describe() const {
    return "N~" + offspring_->describe() + ";Q~" + personalization_.describe() + ";C~" +
           weight_.describe();
}

EmpiricalRootLaw::EmpiricalRootLaw(std::shared_ptr<const ExtendedBiDegreeSequence> seq)
    : seq_(std::move(seq)) {
    if (!seq_ || seq_->size() == 0) throw InvalidSequence("empirical root law needs a nonempty sequence");
}

NodeDraw EmpiricalRootLaw::draw(RandomStream& rng) const {
    const auto i = static_cast<std::size_t>(rng.below(seq_->size()));
    return {seq_->in_degree[i], seq_->personalization[i], 0.0};
}

double EmpiricalRootLaw::mean_offspring() const {
    return static_cast<double>(seq_->total_in()) / static_cast<double>(seq_->size());
}

double EmpiricalRootLaw::mean_personalization() const {
    double s = 0.0;
    for (double q : seq_->personalization) s += q;
    return s / static_cast<double>(seq_->size());
}

EmpiricalBranchingLaw::EmpiricalBranchingLaw(std::shared_ptr<const ExtendedBiDegreeSequence> seq,
                                             EmpiricalForm form)
    : seq_(std::move(seq)), form_(form) {
    if (!seq_) throw InvalidSequence("empirical branching law needs a sequence");
    std::int64_t running = 0;
    cumulative_out_.reserve(seq_->size());
    for (std::int64_t d : seq_->out_degree) cumulative_out_.push_back(running += d);
    if (running == 0)
        throw InvalidSequence("no outbound stubs: the size-biased law is undefined");
    rho_ = mean_offspring() * mean_abs_weight();
}

std::size_t EmpiricalBranchingLaw::draw_row(RandomStream& rng) const {
    const auto stub = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cumulative_out_.back())));
    return static_cast<std::size_t>(
        std::upper_bound(cumulative_out_.begin(), cumulative_out_.end(), stub) - cumulative_out_.begin());
}

NodeDraw EmpiricalBranchingLaw::draw(RandomStream& rng) const {
    const std::size_t row = draw_row(rng);
    NodeDraw d{seq_->in_degree[row], seq_->personalization[row], seq_->weight[row]};
    if (form_ == EmpiricalForm::Product) d.weight = seq_->weight[draw_row(rng)];
    return d;
}

template <class F>
double EmpiricalBranchingLaw::size_biased_mean(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < seq_->size(); ++i)
        s += static_cast<double>(seq_->out_degree[i]) * f(i);
    return s / static_cast<double>(cumulative_out_.back());
}

double EmpiricalBranchingLaw::mean_offspring() const {
    return size_biased_mean([&](std::size_t i) { return static_cast<double>(seq_->in_degree[i]); });
}

double EmpiricalBranchingLaw::mean_weight() const {
    return size_biased_mean([&](std::size_t i) { return seq_->weight[i]; });
}

double EmpiricalBranchingLaw::weight_abs_moment(double p) const {
    return size_biased_mean([&](std::size_t i) { return std::pow(std::abs(seq_->weight[i]), p); });
}

double EmpiricalBranchingLaw::mean_personalization() const {
    return size_biased_mean([&](std::size_t i) { return seq_->personalization[i]; });
}

double EmpiricalBranchingLaw::mean_abs_personalization() const {
    return size_biased_mean([&](std::size_t i) { return std::abs(seq_->personalization[i]); });
}

std::string EmpiricalBranchingLaw::describe() const {
    return form_ == EmpiricalForm::Joint ? "empirical-sizebiased-joint" : "empirical-sizebiased-product";
}

LimitLaws analytic_limit_laws(const DegreeModel& model) {
    const auto& p = model.params();
    LimitLaws laws;
    laws.root = std::make_shared<ProductRootLaw>(model.in_law_ptr(), p.personalization);
    laws.branching = std::make_shared<ProductBranchingLaw>(
        model.in_law_ptr(), p.personalization, WeightLaw::size_biased(model.out_law_ptr(), p.damping));
    return laws;
}

LimitLaws empirical_branching_laws(const ExtendedBiDegreeSequence& seq, EmpiricalForm form) {
    auto shared = std::make_shared<const ExtendedBiDegreeSequence>(seq);
    LimitLaws laws;
    laws.root = std::make_shared<EmpiricalRootLaw>(shared);
    laws.branching = std::make_shared<EmpiricalBranchingLaw>(shared, form);
    return laws;
}

namespace {

int resolve_depth(const ThornyTree& tree, int k) {
    if (k < 0) return tree.depth;
    if (k > tree.depth) throw InvalidParameter("requested generations exceed the tree depth");
    return k;
}

class EndogenousSampler {
public:
    EndogenousSampler(const BranchingLaw& law, double r_leaf, RandomStream& rng, std::size_t max_nodes)
        : law_(law), r_leaf_(r_leaf), rng_(rng), max_nodes_(max_nodes) {}

    //! Value of an individual with `node` attributes and `levels` generations below it.
    double value(const NodeDraw& node, int levels) {
        if (levels == 0) return r_leaf_;
        double sum = node.personalization;
        if (levels == 1 && r_leaf_ == 0.0) return sum;
        for (std::int64_t j = 0; j < node.offspring; ++j) {
            if (++nodes_ > max_nodes_)
                throw PopulationCapExceeded("weighted branching process exceeded its node budget");
            const NodeDraw child = law_.draw(rng_);
            sum += child.weight * value(child, levels - 1);
        }
        return sum;
    }

private:
    const BranchingLaw& law_;
    double r_leaf_;
    RandomStream& rng_;
    std::size_t max_nodes_;
    std::size_t nodes_ = 1;
};

void require_subcritical(const BranchingLaw& law) {
    const double rho = law.rho();
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "E[N] E|C| = " << rho << " >= 1: the endogenous solution is not well defined";
        throw InvalidParameter(os.str());
    }
}

} // namespace

double tbt_root_rank(const ThornyTree& tree, double r0, int k) {
    k = resolve_depth(tree, k);
    const std::size_t end = tree.generation_start[static_cast<std::size_t>(k) + 1];
    std::vector<double> value(end, r0);
    for (std::size_t v = tree.generation_start[static_cast<std::size_t>(k)]; v-- > 0;) {
        double sum = tree.personalization[v];
        const std::size_t first = tree.first_child[v];
        for (std::int64_t j = 0; j < tree.in_degree[v]; ++j) {
            const std::size_t child = first + static_cast<std::size_t>(j);
            sum += tree.weight[child] * value[child];
        }
        value[v] = sum;
    }
    return value[0];
}

double tbt_root_rank_weighted_sum(const ThornyTree& tree, double r0, int k) {
    k = resolve_depth(tree, k);
    double leaves = 0.0, inner = 0.0;
    const std::size_t inner_end = tree.generation_start[static_cast<std::size_t>(k)];
    const std::size_t end = tree.generation_start[static_cast<std::size_t>(k) + 1];
    for (std::size_t v = 0; v < inner_end; ++v) inner += tree.path_weight[v] * tree.personalization[v];
    for (std::size_t v = inner_end; v < end; ++v) leaves += tree.path_weight[v];
    return leaves * r0 + inner;
}

double sample_endogenous(const BranchingLaw& law, int k, double r_leaf, RandomStream& rng,
                         std::size_t max_nodes) {
    if (k < 0) throw InvalidParameter("generation count must be >= 0");
    require_subcritical(law);
    if (k == 0) return r_leaf;
    EndogenousSampler sampler(law, r_leaf, rng, max_nodes);
    return sampler.value(law.draw(rng), k);
}

double sample_r_star(const LimitLaws& laws, int k, RandomStream& rng, double r_leaf,
                     std::size_t max_nodes) {
    if (k < 0) throw InvalidParameter("generation count must be >= 0");
    require_subcritical(*laws.branching);
    if (k == 0) return r_leaf;
    EndogenousSampler sampler(*laws.branching, r_leaf, rng, max_nodes);
    return sampler.value(laws.root->draw(rng), k);
}

double truncation_bound(const BranchingLaw& law, int k, double r_leaf) {
    const double rho = law.rho();
    if (!(rho < 1.0)) throw InvalidParameter("truncation bound needs rho < 1");
    return (std::abs(r_leaf) + law.mean_abs_personalization() / (1.0 - rho)) * std::pow(rho, k);
}

} // namespace dcmrank
