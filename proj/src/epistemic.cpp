#include "efeplan/epistemic.hpp"

#include <cmath>

#include "efeplan/info.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

namespace {

double log_partition(std::span<const double> log_values,
                     std::span<const std::uint8_t> defined) {
    std::vector<double> kept;
    kept.reserve(log_values.size());
    for (std::size_t i = 0; i < log_values.size(); ++i)
        if (defined.empty() || defined[i] != 0) kept.push_back(log_values[i]);
    return log_sum_exp(kept);
}

} // namespace

EpistemicPriors epistemic_priors(const StructuredPosterior& post, bool normalized,
                                 double corrupt_tilde_u_scale) {
    return epistemic_priors(post, summarize(post), normalized, corrupt_tilde_u_scale);
}

EpistemicPriors epistemic_priors(const StructuredPosterior& post,
                                 const PosteriorSummaries& sum, bool normalized,
                                 double corrupt_tilde_u_scale) {
    const PosteriorShape& s = post.shape();

    EpistemicPriors out;
    out.normalized = normalized;
    out.log_tilde_u.resize(s.num_policies);
    for (std::size_t u = 0; u < s.num_policies; ++u)
        out.log_tilde_u[u] = entropy_from_logs(post.x_slice(u));

    out.log_tilde_x.resize(s.x_size);
    out.x_defined.assign(s.x_size, 1);
    for (std::size_t x = 0; x < s.x_size; ++x) {
        if (!post.y_slice_defined(x)) {
            out.x_defined[x] = 0;
            out.log_tilde_x[x] = 0.0;
            continue;
        }
        out.log_tilde_x[x] = -sum.h_y_given_x[x];
    }

    out.log_tilde_yx.resize(s.y_size * s.x_size);
    out.yx_defined.assign(s.y_size * s.x_size, 1);
    for (std::size_t y = 0; y < s.y_size; ++y)
        for (std::size_t x = 0; x < s.x_size; ++x) {
            std::size_t f = y * s.x_size + x;
            if (!post.theta_slice_defined(y, x) || post.log_q_y(x, y) == kNegInf) {
                out.yx_defined[f] = 0;
                out.log_tilde_yx[f] = 0.0;
                continue;
            }
            out.log_tilde_yx[f] = sum.d_theta_yx[f];
        }

    if (normalized) {
        out.log_z_u = log_partition(out.log_tilde_u, {});
        out.log_z_x = log_partition(out.log_tilde_x, out.x_defined);
        out.log_z_yx = log_partition(out.log_tilde_yx, out.yx_defined);
        for (double& v : out.log_tilde_u) v -= out.log_z_u;
        for (std::size_t x = 0; x < s.x_size; ++x)
            if (out.x_defined[x]) out.log_tilde_x[x] -= out.log_z_x;
        for (std::size_t f = 0; f < out.log_tilde_yx.size(); ++f)
            if (out.yx_defined[f]) out.log_tilde_yx[f] -= out.log_z_yx;
    }

    if (corrupt_tilde_u_scale != 1.0) {
        double shift = std::log(corrupt_tilde_u_scale);
        for (double& v : out.log_tilde_u) v += shift;
    }
    return out;
}

Categorical normalized_policy_weight(const StructuredPosterior& post) {
    std::vector<double> h(post.shape().num_policies);
    for (std::size_t u = 0; u < h.size(); ++u)
        h[u] = entropy_from_logs(post.x_slice(u));
    return softmax(h);
}

} // namespace efeplan
