#include "dcmrank/seqgen.hpp"

#include "dcmrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace dcmrank {

double DegreeModelParams::kappa0() const { return std::min(1.0 - 1.0 / alpha, 0.5); }

double DegreeModelParams::effective_delta0() const {
    return delta0 > 0.0 ? delta0 : 0.5 * kappa0();
}

void DegreeModelParams::validate() const {
    std::ostringstream os;
    if (!(alpha > 1.0) || !std::isfinite(alpha)) os << "alpha must be > 1; ";
    if (!(beta > 2.0) || !std::isfinite(beta)) os << "beta must be > 2; ";
    if (!(target_mean > 0.0) || !std::isfinite(target_mean)) os << "target_mean must be > 0; ";
    const double c = damping_bound();
    if (!(c > 0.0 && c < 1.0)) os << "damping law must satisfy 0 < sup|zeta| < 1; ";
    if (alpha > 1.0 && delta0 > 0.0 && !(delta0 < kappa0())) os << "delta0 must lie in (0, kappa0); ";
    if (!os.str().empty()) throw InvalidParameter(os.str());
    poisson_rate_for_mean(alpha, target_mean);
    poisson_rate_for_mean(beta, target_mean);
}

namespace {

const DegreeModelParams& validated(const DegreeModelParams& params) {
    params.validate();
    return params;
}

} // namespace

DegreeModel::DegreeModel(const DegreeModelParams& params)
    : params_(validated(params)),
      in_law_(std::make_shared<ZetaPoissonLaw>(params.alpha + 1.0,
                                               poisson_rate_for_mean(params.alpha, params.target_mean))),
      out_law_(std::make_shared<ZetaPoissonLaw>(params.beta + 1.0,
                                                poisson_rate_for_mean(params.beta, params.target_mean))) {}

RawDegrees sample_raw_degree_pairs(const DegreeModel& model, std::size_t n, RandomStream& rng) {
    RawDegrees raw;
    raw.in.resize(n);
    raw.out.resize(n);
    for (auto& v : raw.in) v = model.in_law().sample(rng);
    for (auto& v : raw.out) v = model.out_law().sample(rng);
    return raw;
}

double imbalance_threshold(const DegreeModelParams& params, std::size_t n) {
    return std::pow(static_cast<double>(n), 1.0 - params.kappa0() + params.effective_delta0());
}

void repair_imbalance(RawDegrees& raw, RandomStream& rng) {
    const std::int64_t delta = std::accumulate(raw.in.begin(), raw.in.end(), std::int64_t{0}) -
                               std::accumulate(raw.out.begin(), raw.out.end(), std::int64_t{0});
    const auto n = static_cast<std::uint64_t>(raw.in.size());
    const auto m = static_cast<std::uint64_t>(delta < 0 ? -delta : delta);
    if (m == 0) return;
    if (m > n) throw InvalidSequence("imbalance exceeds the number of nodes");

    // Floyd's sampling of m distinct indices from [0, n)
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(m);
    for (std::uint64_t j = n - m; j < n; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    auto& target = delta < 0 ? raw.in : raw.out;
    for (auto i : chosen) ++target[i];
}

double weight_from_damping(double zeta, std::int64_t out_degree, double damping_bound) {
    if (out_degree >= 1) {
        const auto d = static_cast<double>(out_degree);
        double w = zeta / d;
        // rounded quotient may overshoot by an ulp; keep the computed load |C| D within |zeta|
        while (std::abs(w) * d > std::abs(zeta)) w = std::nextafter(w, 0.0);
        return w;
    }
    return zeta > 0.0 ? damping_bound : (zeta < 0.0 ? -damping_bound : 0.0);
}

IidAlgorithmResult run_iid_algorithm(const DegreeModel& model, std::size_t n, RandomStream& rng) {
    if (n == 0) throw InvalidParameter("the i.i.d. construction needs n >= 1");
    const auto& params = model.params();
    const double threshold = imbalance_threshold(params, n);

    IidAlgorithmResult result;
    RawDegrees raw;
    std::int64_t delta = 0;
    for (;;) {
        ++result.rounds;
        raw = sample_raw_degree_pairs(model, n, rng);
        delta = std::accumulate(raw.in.begin(), raw.in.end(), std::int64_t{0}) -
                std::accumulate(raw.out.begin(), raw.out.end(), std::int64_t{0});
        if (static_cast<double>(std::abs(delta)) <= threshold) break;
    }
    result.imbalance = delta;
    repair_imbalance(raw, rng);

    auto& seq = result.sequence;
    seq.in_degree = std::move(raw.in);
    seq.out_degree = std::move(raw.out);
    seq.personalization.resize(n);
    for (auto& q : seq.personalization) q = params.personalization(rng);
    seq.weight.resize(n);
    const double c = params.damping_bound();
    for (std::size_t i = 0; i < n; ++i)
        seq.weight[i] = weight_from_damping(params.damping(rng), seq.out_degree[i], c);
    return result;
}

AssumptionReport check_assumption_events(const ExtendedBiDegreeSequence& seq,
                                         const AssumptionConstants& k) {
    AssumptionReport report;
    report.nu = k.nu;
    report.mu = k.nu[1] / k.nu[0];
    report.lambda = k.nu[2] / k.nu[0];
    report.rho = k.nu[4] * report.mu / k.nu[0];
    report.H = k.H;
    report.gamma = k.gamma;
    report.kappa = k.kappa;

    const std::size_t n = seq.size();
    const double nd = static_cast<double>(n);
    double sum_d = 0, sum_dn = 0, sum_d2 = 0, sum_d2k = 0, sum_cd = 0, sum_q = 0, max_cd = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const auto d = static_cast<double>(seq.out_degree[r]);
        sum_d += d;
        sum_dn += d * static_cast<double>(seq.in_degree[r]);
        sum_d2 += d * d;
        sum_d2k += std::pow(d, 2.0 + k.kappa);
        const double cd = std::abs(seq.weight[r]) * d;
        sum_cd += cd;
        max_cd = std::max(max_cd, cd);
        sum_q += std::abs(seq.personalization[r]);
    }
    const double slack = std::pow(nd, 1.0 - k.gamma);
    report.events[0] = std::abs(sum_d - nd * k.nu[0]) <= slack;
    report.events[1] = std::abs(sum_dn - nd * k.nu[1]) <= slack;
    report.events[2] = std::abs(sum_d2 - nd * k.nu[2]) <= slack;
    report.events[3] = std::abs(sum_d2k - nd * k.nu[3]) <= slack;
    report.events[4] = std::abs(sum_cd - nd * k.nu[4]) <= slack && max_cd <= k.c;
    report.events[5] = sum_q <= k.H * nd;
    report.overall = std::all_of(report.events.begin(), report.events.end(), [](bool b) { return b; });
    return report;
}

AssumptionConstants iid_limit_constants(const DegreeModel& model, double kappa, double gamma) {
    const auto& p = model.params();
    const auto& out = model.out_law();
    AssumptionConstants k;
    k.kappa = kappa > 0.0 ? kappa : 0.5 * (p.beta - 2.0);
    if (!(k.kappa < p.beta - 2.0)) throw InvalidParameter("kappa must lie in (0, beta - 2)");
    const double kappa0 = p.kappa0(), delta0 = p.effective_delta0();
    const double gamma_max = std::min((kappa0 - delta0) * (kappa0 - delta0) / (1.0 - delta0),
                                      (p.beta - 2.0 - k.kappa) / p.beta);
    k.gamma = gamma > 0.0 ? gamma : 0.5 * gamma_max;
    const double mean = out.mean();
    k.nu[0] = mean;
    k.nu[1] = mean * mean;
    k.nu[2] = out.moment(2.0);
    k.nu[3] = out.moment(2.0 + k.kappa);
    k.nu[4] = p.damping.mean_abs() * (1.0 - out.pmf(0));
    k.H = p.personalization.mean_abs() + 1.0;
    k.c = p.damping_bound();
    return k;
}

} // namespace dcmrank
