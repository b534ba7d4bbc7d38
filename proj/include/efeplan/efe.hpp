#pragma once

#include <cstdint>
#include <vector>

#include "efeplan/model.hpp"
#include "efeplan/posterior.hpp"

namespace efeplan {

/// Per-policy expected free energy components, nats.
/// total = risk + ambiguity - novelty, exact field arithmetic.
struct EfeBreakdown {
    std::vector<double> risk;
    std::vector<double> ambiguity;
    std::vector<double> novelty;
    std::vector<double> total;
};

/// Per-policy components of the observation-preference variant.
/// total = pragmatic_cost - salience - novelty.
struct EfePrimeBreakdown {
    std::vector<double> pragmatic_cost;
    std::vector<double> salience;
    std::vector<double> novelty;
    std::vector<double> total;
};

/// Quantities reused by the EFE terms and the epistemic priors:
/// per-trajectory observation entropies, the u-free parameter conditional
/// q(theta|x) = sum_y q(y|x) q(theta|y,x), the per-(y,x) divergence
/// D[q(theta|y,x), q(theta|x)], and its observation average per x.
struct PosteriorSummaries {
    std::vector<double> h_y_given_x;          // [Sx]
    std::vector<double> log_theta_given_x;    // [Sx][Th]
    std::vector<std::uint8_t> theta_x_defined;
    std::vector<double> d_theta_yx;           // [(y,x)] flattened y * Sx + x
    std::vector<double> d_x;                  // [Sx] expectation of d over q(y|x)
};

PosteriorSummaries summarize(const StructuredPosterior& post);

/// Expected free energy per policy:
///   risk(u)      = KL[q(x|u) || p-hat(x)] over state trajectories,
///   ambiguity(u) = E_{q(x|u)} H[q(y|x)],
///   novelty(u)   = E_{q(y,x|u)} D[q(theta|y,x), q(theta|x)].
/// Throws SupportViolationError naming the policy and trajectory when the
/// preference prior misses q(x|u) support.
EfeBreakdown efe(const StructuredPosterior& post, const PreferencePrior& pref);
EfeBreakdown efe(const StructuredPosterior& post, const PreferencePrior& pref,
                 const PosteriorSummaries& sum);

/// Observation-preference variant:
///   pragmatic_cost(u) = E_q[-log p-hat(y)],
///   salience(u)       = E_q[log q(x|y,u) / q(x|u)]  (information gained
///                       about states; equals I[x;y] under the u-slice),
///   novelty as in efe.
EfePrimeBreakdown efe_prime(const StructuredPosterior& post,
                            const ObsPreferencePrior& obs_pref);

/// Evaluates the biased-model form E_q[log q(x,theta|u) / p-bar] with
/// p-bar = q(theta|y,x) q(y|x) p-hat(x) and returns max_u of the absolute
/// difference against the component form of efe().
double check_template(const StructuredPosterior& post, const PreferencePrior& pref);

/// Same check for the observation-preference variant, with
/// p-bar = q(theta|y,x) q(x|y,u) p-hat(y).
double check_template_prime(const StructuredPosterior& post,
                            const ObsPreferencePrior& obs_pref);

} // namespace efeplan
