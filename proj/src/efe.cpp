#include "efeplan/efe.hpp"

#include <cmath>
#include <string>

#include "efeplan/errors.hpp"
#include "efeplan/info.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

PosteriorSummaries summarize(const StructuredPosterior& post) {
    const PosteriorShape& s = post.shape();
    const std::size_t Sx = s.x_size, Oy = s.y_size, Th = s.num_theta;

    PosteriorSummaries out;
    out.h_y_given_x.assign(Sx, 0.0);
    out.log_theta_given_x.assign(Sx * Th, kNegInf);
    out.theta_x_defined.assign(Sx, 1);
    out.d_theta_yx.assign(Oy * Sx, 0.0);
    out.d_x.assign(Sx, 0.0);

#pragma omp parallel for schedule(static) if (Sx > 32)
    for (long long xi = 0; xi < static_cast<long long>(Sx); ++xi) {
        const std::size_t x = static_cast<std::size_t>(xi);
        if (!post.y_slice_defined(x)) {
            out.theta_x_defined[x] = 0;
            double uni = -std::log(static_cast<double>(Th));
            for (std::size_t t = 0; t < Th; ++t) out.log_theta_given_x[x * Th + t] = uni;
            continue;
        }
        out.h_y_given_x[x] = entropy_from_logs(post.y_slice(x));

        // q(theta|x) = sum_y q(y|x) q(theta|y,x)
        std::vector<double> terms(Oy);
        for (std::size_t t = 0; t < Th; ++t) {
            for (std::size_t y = 0; y < Oy; ++y) {
                double w = post.log_q_y(x, y);
                terms[y] = w == kNegInf ? kNegInf : w + post.log_q_theta(y, x, t);
            }
            out.log_theta_given_x[x * Th + t] = log_sum_exp(terms);
        }
        std::span<double> row(out.log_theta_given_x.data() + x * Th, Th);
        double lm = log_sum_exp(row);
        for (double& v : row) v -= lm;

        double dx = 0.0;
        for (std::size_t y = 0; y < Oy; ++y) {
            double wy = post.log_q_y(x, y);
            if (wy == kNegInf) continue;  // zero-weight slice, contributes nothing
            double d = 0.0;
            for (std::size_t t = 0; t < Th; ++t) {
                double lt = post.log_q_theta(y, x, t);
                if (lt == kNegInf) continue;
                d += std::exp(lt) * (lt - out.log_theta_given_x[x * Th + t]);
            }
            if (d < 0.0) d = 0.0;
            out.d_theta_yx[y * Sx + x] = d;
            dx += std::exp(wy) * d;
        }
        out.d_x[x] = dx;
    }
    return out;
}

EfeBreakdown efe(const StructuredPosterior& post, const PreferencePrior& pref) {
    return efe(post, pref, summarize(post));
}

EfeBreakdown efe(const StructuredPosterior& post, const PreferencePrior& pref,
                 const PosteriorSummaries& sum) {
    const PosteriorShape& s = post.shape();
    const std::vector<double> log_pref = pref.log_trajectory_table();
    if (log_pref.size() != s.x_size)
        throw AxisError("efe: preference prior does not match trajectory space");

    // Absolute continuity scan before the parallel loop (exceptions cannot
    // leave an omp region).
    for (std::size_t u = 0; u < s.num_policies; ++u)
        for (std::size_t x = 0; x < s.x_size; ++x)
            if (post.log_q_x(u, x) != kNegInf && log_pref[x] == kNegInf)
                throw SupportViolationError(
                    "risk undefined for policy " + std::to_string(u) +
                    ": preference assigns zero mass to state trajectory " +
                    std::to_string(x));

    EfeBreakdown br;
    br.risk.assign(s.num_policies, 0.0);
    br.ambiguity.assign(s.num_policies, 0.0);
    br.novelty.assign(s.num_policies, 0.0);
    br.total.assign(s.num_policies, 0.0);

#pragma omp parallel for schedule(static) if (s.num_policies > 8)
    for (long long ui = 0; ui < static_cast<long long>(s.num_policies); ++ui) {
        const std::size_t u = static_cast<std::size_t>(ui);
        double risk = 0.0, amb = 0.0, nov = 0.0;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lq = post.log_q_x(u, x);
            if (lq == kNegInf) continue;
            double w = std::exp(lq);
            risk += w * (lq - log_pref[x]);
            amb += w * sum.h_y_given_x[x];
            nov += w * sum.d_x[x];
        }
        if (risk < 0.0 && risk > -1e-15) risk = 0.0;
        br.risk[u] = risk;
        br.ambiguity[u] = amb;
        br.novelty[u] = nov;
        br.total[u] = risk + amb - nov;
    }
    return br;
}

EfePrimeBreakdown efe_prime(const StructuredPosterior& post,
                            const ObsPreferencePrior& obs_pref) {
    const PosteriorShape& s = post.shape();
    const std::vector<double> log_pref = obs_pref.log_trajectory_table();
    if (log_pref.size() != s.y_size)
        throw AxisError("efe_prime: observation preference does not match trajectory space");

    PosteriorSummaries sum = summarize(post);

    // Support scan up front; the parallel loop below must not throw.
    for (std::size_t y = 0; y < s.y_size; ++y) {
        if (log_pref[y] != kNegInf) continue;
        for (std::size_t u = 0; u < s.num_policies; ++u)
            for (std::size_t x = 0; x < s.x_size; ++x)
                if (post.log_q_x(u, x) != kNegInf && post.log_q_y(x, y) != kNegInf)
                    throw SupportViolationError(
                        "pragmatic cost undefined for policy " + std::to_string(u) +
                        ": observation preference assigns zero mass to trajectory " +
                        std::to_string(y));
    }

    EfePrimeBreakdown br;
    br.pragmatic_cost.assign(s.num_policies, 0.0);
    br.salience.assign(s.num_policies, 0.0);
    br.novelty.assign(s.num_policies, 0.0);
    br.total.assign(s.num_policies, 0.0);

#pragma omp parallel for schedule(static) if (s.num_policies > 8)
    for (long long ui = 0; ui < static_cast<long long>(s.num_policies); ++ui) {
        const std::size_t u = static_cast<std::size_t>(ui);
        // q(y|u) = sum_x q(x|u) q(y|x)
        std::vector<double> log_qy_u(s.y_size, kNegInf);
        std::vector<double> terms(s.x_size);
        for (std::size_t y = 0; y < s.y_size; ++y) {
            for (std::size_t x = 0; x < s.x_size; ++x) {
                double lx = post.log_q_x(u, x);
                terms[x] = lx == kNegInf ? kNegInf : lx + post.log_q_y(x, y);
            }
            log_qy_u[y] = log_sum_exp(terms);
        }

        double prag = 0.0, sal = 0.0, nov = 0.0;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lx = post.log_q_x(u, x);
            if (lx == kNegInf) continue;
            double wx = std::exp(lx);
            nov += wx * sum.d_x[x];
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double ly = post.log_q_y(x, y);
                if (ly == kNegInf) continue;
                double w = wx * std::exp(ly);
                prag -= w * log_pref[y];
                // log q(x|y,u) - log q(x|u) = log q(y|x) - log q(y|u)
                sal += w * (ly - log_qy_u[y]);
            }
        }
        if (sal < 0.0 && sal > -1e-15) sal = 0.0;
        br.pragmatic_cost[u] = prag;
        br.salience[u] = sal;
        br.novelty[u] = nov;
        br.total[u] = prag - sal - nov;
    }
    return br;
}

double check_template(const StructuredPosterior& post, const PreferencePrior& pref) {
    const PosteriorShape& s = post.shape();
    PosteriorSummaries sum = summarize(post);
    EfeBreakdown br = efe(post, pref, sum);
    const std::vector<double> log_pref = pref.log_trajectory_table();

    double max_resid = 0.0;
    for (std::size_t u = 0; u < s.num_policies; ++u) {
        // E_q [ log q(x|u) q(theta|x) / (q(theta|y,x) q(y|x) p-hat(x)) ]
        double val = 0.0;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lx = post.log_q_x(u, x);
            if (lx == kNegInf) continue;
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double ly = post.log_q_y(x, y);
                if (ly == kNegInf) continue;
                for (std::size_t t = 0; t < s.num_theta; ++t) {
                    double lt = post.log_q_theta(y, x, t);
                    if (lt == kNegInf) continue;
                    double w = std::exp(lx + ly + lt);
                    val += w * (lx + sum.log_theta_given_x[x * s.num_theta + t] - lt -
                                ly - log_pref[x]);
                }
            }
        }
        double resid = std::fabs(val - br.total[u]);
        if (resid > max_resid) max_resid = resid;
    }
    return max_resid;
}

double check_template_prime(const StructuredPosterior& post,
                            const ObsPreferencePrior& obs_pref) {
    const PosteriorShape& s = post.shape();
    PosteriorSummaries sum = summarize(post);
    EfePrimeBreakdown br = efe_prime(post, obs_pref);
    const std::vector<double> log_pref = obs_pref.log_trajectory_table();

    double max_resid = 0.0;
    std::vector<double> terms(s.x_size);
    for (std::size_t u = 0; u < s.num_policies; ++u) {
        std::vector<double> log_qy_u(s.y_size, kNegInf);
        for (std::size_t y = 0; y < s.y_size; ++y) {
            for (std::size_t x = 0; x < s.x_size; ++x) {
                double lx = post.log_q_x(u, x);
                terms[x] = lx == kNegInf ? kNegInf : lx + post.log_q_y(x, y);
            }
            log_qy_u[y] = log_sum_exp(terms);
        }
        double val = 0.0;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double lx = post.log_q_x(u, x);
            if (lx == kNegInf) continue;
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double ly = post.log_q_y(x, y);
                if (ly == kNegInf) continue;
                // log q(x|y,u) = log q(x|u) + log q(y|x) - log q(y|u)
                double lxyu = lx + ly - log_qy_u[y];
                for (std::size_t t = 0; t < s.num_theta; ++t) {
                    double lt = post.log_q_theta(y, x, t);
                    if (lt == kNegInf) continue;
                    double w = std::exp(lx + ly + lt);
                    val += w * (lx + sum.log_theta_given_x[x * s.num_theta + t] - lt -
                                lxyu - log_pref[y]);
                }
            }
        }
        double resid = std::fabs(val - br.total[u]);
        if (resid > max_resid) max_resid = resid;
    }
    return max_resid;
}

} // namespace efeplan
