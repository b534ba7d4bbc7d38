#include "efeplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "efeplan/errors.hpp"
#include "efeplan/info.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

const char* to_string(Mode mode) {
    switch (mode) {
    case Mode::full_efe: return "full_efe";
    case Mode::kl_control: return "kl_control";
    case Mode::bayes_design: return "bayes_design";
    case Mode::utility_only: return "utility_only";
    }
    return "?";
}

const char* to_string(PriorVariant v) {
    return v == PriorVariant::normalized ? "normalized" : "unnormalized";
}

std::vector<double> mode_totals(const EfeBreakdown& br, Mode mode) {
    std::size_t n = br.total.size();
    std::vector<double> out(n);
    switch (mode) {
    case Mode::full_efe:
        out = br.total;
        break;
    case Mode::kl_control:
    case Mode::utility_only:
        out = br.risk;
        break;
    case Mode::bayes_design:
        for (std::size_t u = 0; u < n; ++u) out[u] = br.ambiguity[u] - br.novelty[u];
        break;
    }
    return out;
}

namespace {

/// Shared evaluation core: per-policy B(u) with a supplied prior table, and
/// the support scan. log p(x,theta|u) is materialized per policy.
std::vector<double> inner_energies(const StructuredPosterior& post,
                                   const GenerativeModel& model,
                                   const std::vector<double>& log_pref,
                                   const EpistemicPriors* priors) {
    const PosteriorShape& s = post.shape();
    if (s != PosteriorShape::of(model))
        throw AxisError("posterior shape does not match model");

    std::vector<std::vector<double>> log_pxt(s.num_policies);
    for (std::size_t u = 0; u < s.num_policies; ++u)
        log_pxt[u] = model.log_state_theta_given_policy(model.policies()[u]);

    // Support scan (serial; the parallel loop must not throw).
    for (std::size_t u = 0; u < s.num_policies; ++u)
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lx = post.log_q_x(u, x);
            if (lx == kNegInf) continue;
            if (!log_pref.empty() && log_pref[x] == kNegInf)
                throw SupportViolationError(
                    "free energy undefined: preference excludes state trajectory " +
                    std::to_string(x) + " reachable under policy " + std::to_string(u));
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double ly = post.log_q_y(x, y);
                if (ly == kNegInf) continue;
                for (std::size_t t = 0; t < s.num_theta; ++t) {
                    double lt = post.log_q_theta(y, x, t);
                    if (lt == kNegInf) continue;
                    double lp = log_pxt[u][x * s.num_theta + t] +
                                model.log_lik_trajectory(y, x, static_cast<int>(t));
                    if (lp == kNegInf)
                        throw SupportViolationError(
                            "free energy undefined at outcome (y=" + std::to_string(y) +
                            ", x=" + std::to_string(x) + ", theta=" + std::to_string(t) +
                            ", u=" + std::to_string(u) +
                            "): posterior mass outside model support");
                }
            }
        }

    std::vector<double> b(s.num_policies, 0.0);
#pragma omp parallel for schedule(static) if (s.num_policies > 1)
    for (long long ui = 0; ui < static_cast<long long>(s.num_policies); ++ui) {
        const std::size_t u = static_cast<std::size_t>(ui);
        const std::vector<double>& pxt = log_pxt[u];
        double acc = 0.0;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lx = post.log_q_x(u, x);
            if (lx == kNegInf) continue;
            double outer_x = 0.0;
            if (!log_pref.empty()) outer_x -= log_pref[x];
            if (priors) {
                outer_x -= priors->log_tilde_u[u];
                if (priors->x_defined[x]) outer_x -= priors->log_tilde_x[x];
            }
            double inner = 0.0;
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double ly = post.log_q_y(x, y);
                if (ly == kNegInf) continue;
                double mid = ly + outer_x + lx;
                if (priors && priors->yx_defined[y * s.x_size + x])
                    mid -= priors->log_tilde_yx[y * s.x_size + x];
                double th_acc = 0.0;
                for (std::size_t t = 0; t < s.num_theta; ++t) {
                    double lt = post.log_q_theta(y, x, t);
                    if (lt == kNegInf) continue;
                    double lp = pxt[x * s.num_theta + t] +
                                model.log_lik_trajectory(y, x, static_cast<int>(t));
                    th_acc += std::exp(lt) * (lt + mid - lp);
                }
                inner += std::exp(ly) * th_acc;
            }
            acc += std::exp(lx) * inner;
        }
        b[u] = acc;
    }
    return b;
}

} // namespace

std::vector<double> policy_inner_energies(const StructuredPosterior& post,
                                          const GenerativeModel& model,
                                          const PreferencePrior& pref,
                                          const EpistemicPriors& priors) {
    return inner_energies(post, model, pref.log_trajectory_table(), &priors);
}

double vfe(const StructuredPosterior& post, const GenerativeModel& model,
           const PreferencePrior& pref, PriorVariant variant,
           double corrupt_tilde_u_scale) {
    EpistemicPriors priors = epistemic_priors(
        post, variant == PriorVariant::normalized, corrupt_tilde_u_scale);
    std::vector<double> b = inner_energies(post, model, pref.log_trajectory_table(), &priors);
    double f = 0.0;
    for (std::size_t u = 0; u < b.size(); ++u) {
        double lq = post.log_q_u(u);
        if (lq == kNegInf) continue;
        f += std::exp(lq) * (lq - model.log_policy_prior(u) + b[u]);
    }
    return f;
}

std::vector<double> complexity(const StructuredPosterior& post,
                               const GenerativeModel& model) {
    std::vector<double> c = inner_energies(post, model, {}, nullptr);
    // KL per policy; remove rounding dust so the nonnegativity contract holds.
    for (double& v : c)
        if (v < 0.0 && v > -1e-12) v = 0.0;
    return c;
}

TheoremReport verify_theorem(const StructuredPosterior& post,
                             const GenerativeModel& model, const PreferencePrior& pref,
                             double corrupt_tilde_u_scale) {
    TheoremReport rep;
    rep.f_direct = vfe(post, model, pref, PriorVariant::unnormalized, corrupt_tilde_u_scale);

    PosteriorSummaries sum = summarize(post);
    EfeBreakdown br = efe(post, pref, sum);
    std::vector<double> c = complexity(post, model);

    double kl_u = 0.0, eg = 0.0, ec = 0.0;
    for (std::size_t u = 0; u < br.total.size(); ++u) {
        double lq = post.log_q_u(u);
        if (lq == kNegInf) continue;
        double w = std::exp(lq);
        kl_u += w * (lq - model.log_policy_prior(u));
        eg += w * br.total[u];
        ec += w * c[u];
    }
    rep.expected_g = eg;
    rep.complexity_total = kl_u + ec;
    rep.residual = std::fabs(rep.f_direct - rep.expected_g - rep.complexity_total);

    EpistemicPriors unnorm = epistemic_priors(post, sum, false, corrupt_tilde_u_scale);
    std::vector<double> b = policy_inner_energies(post, model, pref, unnorm);
    rep.lemma_residuals.resize(b.size());
    for (std::size_t u = 0; u < b.size(); ++u) {
        rep.lemma_residuals[u] = std::fabs(b[u] - br.total[u] - c[u]);
        rep.max_lemma_residual = std::max(rep.max_lemma_residual, rep.lemma_residuals[u]);
    }

    rep.f_normalized = vfe(post, model, pref, PriorVariant::normalized, corrupt_tilde_u_scale);
    rep.constant_shift = rep.f_direct - rep.f_normalized;
    EpistemicPriors norm = epistemic_priors(post, sum, true, corrupt_tilde_u_scale);
    rep.recorded_constants = norm.log_partition_sum();
    return rep;
}

PlannerResult optimal_policy(const GenerativeModel& model, const PreferencePrior& pref,
                             Mode mode) {
    StructuredPosterior post = exact_posterior(model);
    PosteriorSummaries sum = summarize(post);

    PlannerResult res;
    res.mode = mode;
    res.breakdown = efe(post, pref, sum);
    res.complexity = complexity(post, model);
    res.g_mode = mode_totals(res.breakdown, mode);
    res.prior_cost.resize(model.num_policies());

    std::vector<double> scores(model.num_policies());
    for (std::size_t u = 0; u < scores.size(); ++u) {
        res.prior_cost[u] = -model.log_policy_prior(u);
        scores[u] = -res.prior_cost[u] - res.g_mode[u] - res.complexity[u];
    }
    res.q_star = softmax(scores);
    // The optimum of a softmax family: F at q_star is -log sum exp(scores).
    res.f_value = -log_sum_exp(scores);
    return res;
}

MinimizeResult minimize_constrained(const GenerativeModel& model,
                                    const PreferencePrior& pref, PolicyFamily family,
                                    int max_sweeps, double tolerance,
                                    const StructuredPosterior* init) {
    if (max_sweeps < 1) throw Error("minimize_constrained: sweeps must be >= 1");

    StructuredPosterior post = init ? *init : exact_posterior(model);
    MinimizeResult out{post, PlannerResult{}, {}, false, 0};

    double prev_f = vfe(post, model, pref, PriorVariant::unnormalized);
    if (!std::isfinite(prev_f))
        throw SweepDivergenceError("non-finite F before sweep 0");

    PlannerResult res;
    res.mode = Mode::full_efe;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // (a) refresh priors and per-policy costs from the current posterior
        PosteriorSummaries sum = summarize(post);
        res.breakdown = efe(post, pref, sum);
        res.complexity = complexity(post, model);
        res.g_mode = mode_totals(res.breakdown, Mode::full_efe);
        res.prior_cost.assign(model.num_policies(), 0.0);
        std::vector<double> scores(model.num_policies());
        for (std::size_t u = 0; u < scores.size(); ++u) {
            res.prior_cost[u] = -model.log_policy_prior(u);
            scores[u] = -res.prior_cost[u] - res.g_mode[u] - res.complexity[u];
        }

        // (b) coordinate update of the policy marginal within the family
        Categorical q_u = Categorical::uniform(1);
        if (family == PolicyFamily::softmax) {
            q_u = softmax(scores);
        } else {
            std::size_t best = static_cast<std::size_t>(
                std::max_element(scores.begin(), scores.end()) - scores.begin());
            q_u = Categorical::point_mass(scores.size(), best);
        }
        post = post.with_policy_marginal(q_u);

        // (c) evaluate F self-consistently after the sweep
        double f = vfe(post, model, pref, PriorVariant::unnormalized);
        if (!std::isfinite(f))
            throw SweepDivergenceError("non-finite F at sweep " + std::to_string(sweep));
        out.f_history.push_back(f);
        out.sweeps_run = sweep + 1;
        if (std::fabs(f - prev_f) < tolerance) {
            out.converged = true;
            prev_f = f;
            break;
        }
        prev_f = f;
    }

    res.q_star = post.q_u();
    res.f_value = prev_f;
    out.posterior = post;
    out.result = std::move(res);
    return out;
}

} // namespace efeplan
