#pragma once

#include <cstdint>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/efe.hpp"
#include "efeplan/posterior.hpp"

namespace efeplan {

/// The three epistemic prior tables, log domain:
///   log tilde_u(u)    = H[q(x|u)]
///   log tilde_x(x)    = -H[q(y|x)]
///   log tilde_yx(y,x) = D[q(theta|y,x), q(theta|x)]
/// When normalized, each table is divided by the sum of its exponentials
/// over defined entries and the log-partition constants are recorded.
struct EpistemicPriors {
    std::vector<double> log_tilde_u;    // [U]
    std::vector<double> log_tilde_x;    // [Sx]
    std::vector<double> log_tilde_yx;   // [(y,x)] flattened y * Sx + x
    std::vector<std::uint8_t> x_defined;
    std::vector<std::uint8_t> yx_defined;
    bool normalized = false;
    double log_z_u = 0.0;
    double log_z_x = 0.0;
    double log_z_yx = 0.0;

    double log_partition_sum() const { return log_z_u + log_z_x + log_z_yx; }
};

/// Computes the priors from the posterior they are functionals of.
/// corrupt_tilde_u_scale is a test hook: it multiplies the unnormalized
/// tilde_u table without recording the constant, which breaks the
/// free-energy decomposition by exactly log(scale).
EpistemicPriors epistemic_priors(const StructuredPosterior& post, bool normalized,
                                 double corrupt_tilde_u_scale = 1.0);
EpistemicPriors epistemic_priors(const StructuredPosterior& post,
                                 const PosteriorSummaries& sum, bool normalized,
                                 double corrupt_tilde_u_scale = 1.0);

/// Softmax over the policy-conditional state entropies H[q(x|u)]; equals
/// the normalized tilde_u table.
Categorical normalized_policy_weight(const StructuredPosterior& post);

} // namespace efeplan
