#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/model.hpp"
#include "efeplan/posterior.hpp"

namespace efeplan::oracle {

/// One main-vs-reference comparison row.
struct OracleReport {
    std::string quantity;
    double main_value = 0.0;
    double oracle_value = 0.0;
    double abs_diff = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

OracleReport make_report(std::string quantity, double main_value, double oracle_value,
                         double tolerance);

/// Hard cap on enumerated outcome tuples per policy.
inline constexpr std::size_t kOracleTupleCap = 10'000'000;

/// Expected-free-energy components recomputed by explicit nested summation
/// over every (y, x, theta) trajectory tuple, serial and in the linear
/// domain with compensated accumulation. Independent of the main EFE path.
struct OracleEfe {
    double risk = 0.0;
    double ambiguity = 0.0;
    double novelty = 0.0;
    double total = 0.0;
    /// Second route for the ambiguity term (joint-entropy form), kept for
    /// internal cross-checking of the reference itself.
    double ambiguity_alt = 0.0;
};

OracleEfe oracle_efe(const GenerativeModel& model, const PreferencePrior& pref,
                     const Policy& policy);

/// F[q] by a single sum over all (y, x, theta, u) tuples.
double oracle_vfe(const StructuredPosterior& post, const GenerativeModel& model,
                  const PreferencePrior& pref, bool normalized_priors,
                  double corrupt_tilde_u_scale = 1.0);

/// KL[q(y,x,theta|u) || p(y,x,theta|u)] for one policy.
double oracle_complexity(const StructuredPosterior& post, const GenerativeModel& model,
                         std::size_t policy_index);

/// Posterior over (state, theta) after one action/observation, by direct
/// Bayes-rule summation. Linear probabilities, state-major.
std::vector<double> oracle_belief_update(const GenerativeModel& model, int action,
                                         int observation);

/// p(y, x, theta | policy) by direct products, linear probabilities in
/// (y, x, theta) order with theta fastest.
std::vector<double> oracle_predictive_joint(const GenerativeModel& model,
                                            const Policy& policy);

/// Exhaustive simplex-grid minimizer of F over the policy marginal with the
/// conditional factors fixed at the exact posterior. At most 3 policies.
Categorical oracle_policy_posterior(const GenerativeModel& model,
                                    const PreferencePrior& pref,
                                    double resolution = 1e-3);

} // namespace efeplan::oracle
