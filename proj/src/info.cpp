#include "efeplan/info.hpp"

#include <algorithm>
#include <cmath>

namespace efeplan {

double entropy_from_logs(std::span<const double> log_probs) {
    double h = 0.0;
    for (double lp : log_probs) h -= xlogx_from_log(lp);
    return h < 0.0 ? 0.0 : h;  // clamp fp residue on delta distributions
}

std::vector<double> entropy_given(const ConditionalTable& cond) {
    std::vector<double> out(cond.given_size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long g = 0; g < static_cast<long long>(cond.given_size()); ++g) {
        if (cond.slice_defined(g))
            out[g] = entropy_from_logs(cond.slice(g));
    }
    return out;
}

double conditional_entropy(const JointTable& joint,
                           const std::vector<std::string>& target,
                           const std::vector<std::string>& given) {
    ConditionalTable cond = joint.conditional(target, given);
    JointTable gm = joint.marginal(given);
    std::vector<double> h = entropy_given(cond);
    double total = 0.0;
    for (std::size_t g = 0; g < h.size(); ++g)
        total += prob_from_log(gm.log_probs()[g]) * h[g];
    return total;
}

double kl_divergence_from_logs(std::span<const double> p_logs,
                               std::span<const double> q_logs) {
    if (p_logs.size() != q_logs.size())
        throw AxisError("kl_divergence: support size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p_logs.size(); ++i) {
        if (p_logs[i] == kNegInf) continue;
        if (q_logs[i] == kNegInf)
            throw DivergenceUndefinedError(
                "kl_divergence: p has mass at outcome " + std::to_string(i) +
                " where q has none");
        d += std::exp(p_logs[i]) * (p_logs[i] - q_logs[i]);
    }
    return d;
}

double kl_divergence(const Categorical& p, const Categorical& q) {
    return kl_divergence_from_logs(p.log_probs(), q.log_probs());
}

double mutual_information(const JointTable& joint,
                          const std::string& axis_a,
                          const std::string& axis_b,
                          const std::vector<std::string>& given) {
    for (const std::string& g : given)
        if (g == axis_a || g == axis_b)
            throw AxisError("mutual_information: axes must be disjoint from given");
    if (axis_a == axis_b)
        throw AxisError("mutual_information: axes must be distinct");

    std::vector<std::string> a_given = given;
    a_given.push_back(axis_a);

    // q(b | a, given) and q(b | given) share the target axis; the weight is
    // the (a, given) marginal.
    ConditionalTable b_given_ag = joint.conditional({axis_b}, a_given);
    ConditionalTable b_given_g = joint.conditional({axis_b}, given);
    JointTable ag = joint.marginal(a_given);

    const std::size_t a_size = joint.axis(axis_a).size;
    double mi = 0.0;
    for (std::size_t f = 0; f < ag.size(); ++f) {
        double w = prob_from_log(ag.log_probs()[f]);
        if (w == 0.0) continue;
        // ag is (given..., a) with a fastest; the given-flat for b_given_g
        // is f / a_size.
        mi += w * kl_divergence_from_logs(b_given_ag.slice(f),
                                          b_given_g.slice(f / a_size));
    }
    return mi < 0.0 ? 0.0 : mi;
}

Categorical softmax(std::span<const double> scores) {
    if (scores.empty()) throw EmptyInputError("softmax: empty score vector");
    for (double s : scores)
        if (!std::isfinite(s)) throw Error("softmax: non-finite score");
    double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - m);
    double logz = std::log(z);
    std::vector<double> lp(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) lp[i] = scores[i] - m - logz;
    return Categorical::from_log_probs(std::move(lp));
}

} // namespace efeplan
