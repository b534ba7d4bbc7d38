#pragma once

#include <optional>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/efe.hpp"
#include "efeplan/epistemic.hpp"
#include "efeplan/model.hpp"
#include "efeplan/posterior.hpp"

namespace efeplan {

enum class Mode { full_efe, kl_control, bayes_design, utility_only };
enum class PriorVariant { unnormalized, normalized };

const char* to_string(Mode mode);
const char* to_string(PriorVariant variant);

/// Per-policy planning costs and the resulting policy posterior.
/// q_star = softmax(-prior_cost - g_mode - complexity) where g_mode masks
/// the EFE components according to mode (kl_control keeps risk only,
/// bayes_design keeps ambiguity - novelty, utility_only aliases kl_control).
struct PlannerResult {
    std::vector<double> prior_cost;   // P(u) = -log p(u)
    EfeBreakdown breakdown;           // full components
    std::vector<double> g_mode;       // masked totals used for selection
    std::vector<double> complexity;   // C(u)
    Categorical q_star = Categorical::uniform(1);
    double f_value = 0.0;             // free energy attained at q_star
    Mode mode = Mode::full_efe;
};

/// Masked per-policy total for a mode.
std::vector<double> mode_totals(const EfeBreakdown& br, Mode mode);

/// The augmented variational free energy
///   F[q] = E_q[ log q / (p * p-hat * tilde_u * tilde_x * tilde_yx) ]
/// with epistemic priors computed from q itself. Throws
/// SupportViolationError naming the offending outcome tuple when q puts
/// mass outside the support of the denominator.
double vfe(const StructuredPosterior& post, const GenerativeModel& model,
           const PreferencePrior& pref, PriorVariant variant,
           double corrupt_tilde_u_scale = 1.0);

/// C(u) = KL[q(y,x,theta|u) || p(y,x,theta|u)] per policy.
std::vector<double> complexity(const StructuredPosterior& post,
                               const GenerativeModel& model);

/// Per-policy inner free energies B(u) (the bracketed term of the
/// decomposition), evaluated by direct summation with the given priors.
std::vector<double> policy_inner_energies(const StructuredPosterior& post,
                                          const GenerativeModel& model,
                                          const PreferencePrior& pref,
                                          const EpistemicPriors& priors);

/// Joint report of the decomposition identity, its per-policy form, and
/// the normalization constant shift.
struct TheoremReport {
    double f_direct = 0.0;          // F via direct summation, unnormalized priors
    double expected_g = 0.0;        // E_{q(u)} G(u)
    double complexity_total = 0.0;  // E_q[ log q(yxthetau) / p(yxthetau) ]
    double residual = 0.0;          // |f_direct - expected_g - complexity_total|
    std::vector<double> lemma_residuals;  // per policy |B(u) - G(u) - C(u)|
    double max_lemma_residual = 0.0;
    double f_normalized = 0.0;      // F with normalized priors
    double constant_shift = 0.0;    // f_direct - f_normalized
    double recorded_constants = 0.0;  // log Z_u + log Z_x + log Z_yx
};

TheoremReport verify_theorem(const StructuredPosterior& post,
                             const GenerativeModel& model, const PreferencePrior& pref,
                             double corrupt_tilde_u_scale = 1.0);

/// Exact-regime planner: builds the exact posterior, scores policies, and
/// returns the softmax policy posterior per Mode.
PlannerResult optimal_policy(const GenerativeModel& model, const PreferencePrior& pref,
                             Mode mode);

/// Policy-marginal families for constrained minimization.
enum class PolicyFamily { softmax, point_mass };

struct MinimizeResult {
    StructuredPosterior posterior;
    PlannerResult result;
    std::vector<double> f_history;  // F after each sweep
    bool converged = false;
    int sweeps_run = 0;
};

/// Coordinate descent on F over the policy marginal, holding the
/// conditional factors fixed (a mean-field restriction over policies).
/// Epistemic priors are refreshed from the current posterior at the start
/// of every sweep; F is evaluated after each sweep and the sweep loop stops
/// when |dF| < tolerance or the budget is exhausted. Starts from the exact
/// posterior unless an initial posterior is supplied.
MinimizeResult minimize_constrained(const GenerativeModel& model,
                                    const PreferencePrior& pref, PolicyFamily family,
                                    int max_sweeps, double tolerance,
                                    const StructuredPosterior* init = nullptr);

} // namespace efeplan
