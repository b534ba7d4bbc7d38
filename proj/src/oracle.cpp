#include "efeplan/oracle.hpp"

#include <cmath>

#include "efeplan/errors.hpp"

// Brute-force reference path. Everything here is recomputed with naive
// nested loops over explicit outcome tuples, serially, in the linear domain
// with compensated long-double accumulation. It deliberately shares no
// computation code with the main modules; only the table types are read
// through their field accessors.

namespace efeplan::oracle {

namespace {

struct Kahan {
    long double sum = 0.0L;
    long double c = 0.0L;
    void add(long double v) {
        long double y = v - c;
        long double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    double value() const { return static_cast<double>(sum); }
};

double lin(double logp) { return logp == -INFINITY ? 0.0 : std::exp(logp); }

struct LinearModel {
    int S, O, A, Th, H;
    std::size_t Sx, Oy, U;
    std::vector<double> belief;   // [S][Th]
    std::vector<double> lik;      // [Th][S][O]
    std::vector<double> trans;    // [A][S][S]
    std::vector<double> prior_u;  // [U]

    explicit LinearModel(const GenerativeModel& m) {
        S = m.num_states();
        O = m.num_obs();
        A = m.num_actions();
        Th = m.num_theta();
        H = m.horizon();
        Sx = 1;
        Oy = 1;
        for (int k = 0; k < H; ++k) {
            Sx *= static_cast<std::size_t>(S);
            Oy *= static_cast<std::size_t>(O);
        }
        U = m.num_policies();
        belief.resize(static_cast<std::size_t>(S) * Th);
        for (int x = 0; x < S; ++x)
            for (int t = 0; t < Th; ++t)
                belief[static_cast<std::size_t>(x) * Th + t] =
                    lin(m.log_belief()[static_cast<std::size_t>(x) * Th + t]);
        lik.resize(static_cast<std::size_t>(Th) * S * O);
        for (int t = 0; t < Th; ++t)
            for (int x = 0; x < S; ++x)
                for (int y = 0; y < O; ++y)
                    lik[(static_cast<std::size_t>(t) * S + x) * O + y] =
                        lin(m.log_lik(t, x, y));
        trans.resize(static_cast<std::size_t>(A) * S * S);
        for (int a = 0; a < A; ++a)
            for (int x = 0; x < S; ++x)
                for (int x2 = 0; x2 < S; ++x2)
                    trans[(static_cast<std::size_t>(a) * S + x) * S + x2] =
                        lin(m.log_trans(a, x, x2));
        prior_u.resize(U);
        for (std::size_t u = 0; u < U; ++u) prior_u[u] = lin(m.log_policy_prior(u));
    }

    void decode_x(std::size_t flat, std::vector<int>& out) const {
        out.assign(H, 0);
        for (int k = H - 1; k >= 0; --k) {
            out[k] = static_cast<int>(flat % S);
            flat /= S;
        }
    }
    void decode_y(std::size_t flat, std::vector<int>& out) const {
        out.assign(H, 0);
        for (int k = H - 1; k >= 0; --k) {
            out[k] = static_cast<int>(flat % O);
            flat /= O;
        }
    }

    double lik_traj(const std::vector<int>& ys, const std::vector<int>& xs, int t) const {
        double p = 1.0;
        for (int k = 0; k < H; ++k)
            p *= lik[(static_cast<std::size_t>(t) * S + xs[k]) * O + ys[k]];
        return p;
    }

    /// p(x-trajectory, theta | policy) with the initial state summed out.
    std::vector<double> p_x_theta(const Policy& pol) const {
        std::vector<double> out(Sx * Th, 0.0);
        std::vector<int> xs;
        for (std::size_t xf = 0; xf < Sx; ++xf) {
            decode_x(xf, xs);
            for (int t = 0; t < Th; ++t) {
                Kahan acc;
                for (int x0 = 0; x0 < S; ++x0) {
                    double p = belief[static_cast<std::size_t>(x0) * Th + t];
                    int prev = x0;
                    for (int k = 0; k < H; ++k) {
                        p *= trans[(static_cast<std::size_t>(pol.actions[k]) * S + prev) * S +
                                   xs[k]];
                        prev = xs[k];
                    }
                    acc.add(p);
                }
                out[xf * Th + t] = acc.value();
            }
        }
        return out;
    }
};

std::vector<double> pref_traj(const PreferencePrior& pref, const LinearModel& lm) {
    std::vector<double> out(lm.Sx, 1.0);
    std::vector<int> xs;
    for (std::size_t xf = 0; xf < lm.Sx; ++xf) {
        lm.decode_x(xf, xs);
        double p = 1.0;
        for (int k = 0; k < lm.H; ++k) p *= pref.step(k).prob(xs[k]);
        out[xf] = p;
    }
    return out;
}

void check_cap(std::size_t tuples) {
    if (tuples > kOracleTupleCap)
        throw OracleCapacityError("reference enumeration of " + std::to_string(tuples) +
                                  " tuples exceeds cap " + std::to_string(kOracleTupleCap));
}

/// Exact-regime conditionals rebuilt the slow way: the policy-prior mixture
/// over (x, theta), the parameter conditional p(theta|x), the observation
/// mixture q(y|x), and the parameter posterior q(theta|y,x).
struct OracleExact {
    LinearModel lm;
    std::vector<std::vector<double>> px_theta;  // per policy [Sx*Th]
    std::vector<double> p_theta_x;              // [Sx][Th]
    std::vector<double> q_y_x;                  // [Sx][Oy]
    std::vector<double> q_theta_yx;             // [Oy*Sx][Th]

    explicit OracleExact(const GenerativeModel& m) : lm(m) {
        check_cap(lm.Oy * lm.Sx * lm.Th);
        px_theta.resize(lm.U);
        for (std::size_t u = 0; u < lm.U; ++u)
            px_theta[u] = lm.p_x_theta(m.policies()[u]);

        std::vector<double> theta_marg(lm.Th, 0.0);
        for (int x0 = 0; x0 < lm.S; ++x0)
            for (int t = 0; t < lm.Th; ++t)
                theta_marg[t] += lm.belief[static_cast<std::size_t>(x0) * lm.Th + t];

        p_theta_x.assign(lm.Sx * lm.Th, 0.0);
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            double row = 0.0;
            for (int t = 0; t < lm.Th; ++t) {
                Kahan acc;
                for (std::size_t u = 0; u < lm.U; ++u)
                    acc.add(lm.prior_u[u] * px_theta[u][x * lm.Th + t]);
                p_theta_x[x * lm.Th + t] = acc.value();
                row += p_theta_x[x * lm.Th + t];
            }
            for (int t = 0; t < lm.Th; ++t)
                p_theta_x[x * lm.Th + t] =
                    row > 0.0 ? p_theta_x[x * lm.Th + t] / row : theta_marg[t];
        }

        q_y_x.assign(lm.Sx * lm.Oy, 0.0);
        q_theta_yx.assign(lm.Oy * lm.Sx * lm.Th, 0.0);
        std::vector<int> xs, ys;
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            lm.decode_x(x, xs);
            for (std::size_t y = 0; y < lm.Oy; ++y) {
                lm.decode_y(y, ys);
                double mix = 0.0;
                for (int t = 0; t < lm.Th; ++t)
                    mix += p_theta_x[x * lm.Th + t] * lm.lik_traj(ys, xs, t);
                q_y_x[x * lm.Oy + y] = mix;
                for (int t = 0; t < lm.Th; ++t)
                    q_theta_yx[(y * lm.Sx + x) * lm.Th + t] =
                        mix > 0.0
                            ? p_theta_x[x * lm.Th + t] * lm.lik_traj(ys, xs, t) / mix
                            : 1.0 / lm.Th;
            }
        }
    }
};

} // namespace

OracleReport make_report(std::string quantity, double main_value, double oracle_value,
                         double tolerance) {
    OracleReport r;
    r.quantity = std::move(quantity);
    r.main_value = main_value;
    r.oracle_value = oracle_value;
    r.abs_diff = std::fabs(main_value - oracle_value);
    r.tolerance = tolerance;
    r.pass = r.abs_diff <= tolerance;
    return r;
}

OracleEfe oracle_efe(const GenerativeModel& model, const PreferencePrior& pref,
                     const Policy& policy) {
    OracleExact ex(model);
    const LinearModel& lm = ex.lm;
    std::vector<double> phat = pref_traj(pref, lm);

    std::size_t u = lm.U;  // locate the policy in the model's set
    for (std::size_t i = 0; i < lm.U; ++i)
        if (model.policies()[i] == policy) u = i;
    std::vector<double> pxt = u < lm.U ? ex.px_theta[u] : lm.p_x_theta(policy);

    std::vector<double> px(lm.Sx, 0.0);
    for (std::size_t x = 0; x < lm.Sx; ++x)
        for (int t = 0; t < lm.Th; ++t) px[x] += pxt[x * lm.Th + t];

    OracleEfe out;
    Kahan risk, amb, amb_alt, nov;
    for (std::size_t x = 0; x < lm.Sx; ++x) {
        if (px[x] <= 0.0) continue;
        if (phat[x] <= 0.0)
            throw SupportViolationError("oracle risk undefined at state trajectory " +
                                        std::to_string(x));
        risk.add(static_cast<long double>(px[x]) * std::log(px[x] / phat[x]));
        Kahan h;
        for (std::size_t y = 0; y < lm.Oy; ++y) {
            double q = ex.q_y_x[x * lm.Oy + y];
            if (q <= 0.0) continue;
            h.add(-static_cast<long double>(q) * std::log(q));
            // joint-entropy route for the same term
            double pxy = px[x] * q;
            amb_alt.add(-static_cast<long double>(pxy) * std::log(pxy / px[x]));
            Kahan d;
            for (int t = 0; t < lm.Th; ++t) {
                double post = ex.q_theta_yx[(y * lm.Sx + x) * lm.Th + t];
                if (post <= 0.0) continue;
                d.add(static_cast<long double>(post) *
                      std::log(post / ex.p_theta_x[x * lm.Th + t]));
            }
            nov.add(static_cast<long double>(px[x]) * q * d.sum);
        }
        amb.add(static_cast<long double>(px[x]) * h.sum);
    }
    out.risk = risk.value();
    out.ambiguity = amb.value();
    out.ambiguity_alt = amb_alt.value();
    out.novelty = nov.value();
    out.total = out.risk + out.ambiguity - out.novelty;
    return out;
}

double oracle_vfe(const StructuredPosterior& post, const GenerativeModel& model,
                  const PreferencePrior& pref, bool normalized_priors,
                  double corrupt_tilde_u_scale) {
    LinearModel lm(model);
    const PosteriorShape& s = post.shape();
    check_cap(lm.Oy * lm.Sx * lm.Th * lm.U);

    std::vector<double> phat = pref_traj(pref, lm);

    // Linear copies of the posterior factors.
    std::vector<double> qu(s.num_policies);
    for (std::size_t u = 0; u < s.num_policies; ++u) qu[u] = lin(post.log_q_u(u));
    std::vector<double> qx(s.num_policies * s.x_size);
    for (std::size_t u = 0; u < s.num_policies; ++u)
        for (std::size_t x = 0; x < s.x_size; ++x)
            qx[u * s.x_size + x] = lin(post.log_q_x(u, x));
    std::vector<double> qy(s.x_size * s.y_size);
    for (std::size_t x = 0; x < s.x_size; ++x)
        for (std::size_t y = 0; y < s.y_size; ++y)
            qy[x * s.y_size + y] = lin(post.log_q_y(x, y));
    std::vector<double> qt(s.y_size * s.x_size * s.num_theta);
    for (std::size_t y = 0; y < s.y_size; ++y)
        for (std::size_t x = 0; x < s.x_size; ++x)
            for (std::size_t t = 0; t < s.num_theta; ++t)
                qt[(y * s.x_size + x) * s.num_theta + t] = lin(post.log_q_theta(y, x, t));

    // Epistemic priors recomputed the slow way.
    std::vector<double> tilde_u(s.num_policies);
    for (std::size_t u = 0; u < s.num_policies; ++u) {
        Kahan h;
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double p = qx[u * s.x_size + x];
            if (p > 0.0) h.add(-static_cast<long double>(p) * std::log(p));
        }
        tilde_u[u] = std::exp(h.value());
    }
    std::vector<double> tilde_x(s.x_size, 1.0);
    std::vector<bool> x_def(s.x_size, true);
    for (std::size_t x = 0; x < s.x_size; ++x) {
        if (!post.y_slice_defined(x)) {
            x_def[x] = false;
            continue;
        }
        Kahan h;
        for (std::size_t y = 0; y < s.y_size; ++y) {
            double p = qy[x * s.y_size + y];
            if (p > 0.0) h.add(-static_cast<long double>(p) * std::log(p));
        }
        tilde_x[x] = std::exp(-h.value());
    }
    // q(theta|x) = sum_y q(y|x) q(theta|y,x)
    std::vector<double> qtx(s.x_size * s.num_theta, 0.0);
    for (std::size_t x = 0; x < s.x_size; ++x)
        for (std::size_t t = 0; t < s.num_theta; ++t) {
            Kahan acc;
            for (std::size_t y = 0; y < s.y_size; ++y)
                acc.add(static_cast<long double>(qy[x * s.y_size + y]) *
                        qt[(y * s.x_size + x) * s.num_theta + t]);
            qtx[x * s.num_theta + t] = acc.value();
        }
    std::vector<double> tilde_yx(s.y_size * s.x_size, 1.0);
    std::vector<bool> yx_def(s.y_size * s.x_size, true);
    for (std::size_t y = 0; y < s.y_size; ++y)
        for (std::size_t x = 0; x < s.x_size; ++x) {
            if (!post.theta_slice_defined(y, x) || qy[x * s.y_size + y] <= 0.0) {
                yx_def[y * s.x_size + x] = false;
                continue;
            }
            Kahan d;
            for (std::size_t t = 0; t < s.num_theta; ++t) {
                double p = qt[(y * s.x_size + x) * s.num_theta + t];
                if (p > 0.0)
                    d.add(static_cast<long double>(p) *
                          std::log(p / qtx[x * s.num_theta + t]));
            }
            tilde_yx[y * s.x_size + x] = std::exp(d.value());
        }

    if (normalized_priors) {
        Kahan zu, zx, zyx;
        for (double v : tilde_u) zu.add(v);
        for (std::size_t x = 0; x < s.x_size; ++x)
            if (x_def[x]) zx.add(tilde_x[x]);
        for (std::size_t f = 0; f < tilde_yx.size(); ++f)
            if (yx_def[f]) zyx.add(tilde_yx[f]);
        for (double& v : tilde_u) v /= zu.value();
        for (std::size_t x = 0; x < s.x_size; ++x)
            if (x_def[x]) tilde_x[x] /= zx.value();
        for (std::size_t f = 0; f < tilde_yx.size(); ++f)
            if (yx_def[f]) tilde_yx[f] /= zyx.value();
    }
    if (corrupt_tilde_u_scale != 1.0)
        for (double& v : tilde_u) v *= corrupt_tilde_u_scale;

    std::vector<int> xs, ys;
    Kahan f;
    for (std::size_t u = 0; u < s.num_policies; ++u) {
        if (qu[u] <= 0.0) continue;
        f.add(static_cast<long double>(qu[u]) * std::log(qu[u] / lm.prior_u[u]));
        std::vector<double> pxt = lm.p_x_theta(model.policies()[u]);
        for (std::size_t x = 0; x < s.x_size; ++x) {
            double wx = qx[u * s.x_size + x];
            if (wx <= 0.0) continue;
            lm.decode_x(x, xs);
            for (std::size_t y = 0; y < s.y_size; ++y) {
                double wy = qy[x * s.y_size + y];
                if (wy <= 0.0) continue;
                lm.decode_y(y, ys);
                for (std::size_t t = 0; t < s.num_theta; ++t) {
                    double wt = qt[(y * s.x_size + x) * s.num_theta + t];
                    if (wt <= 0.0) continue;
                    double w = qu[u] * wx * wy * wt;
                    double denom = pxt[x * s.num_theta + t] *
                                   lm.lik_traj(ys, xs, static_cast<int>(t)) * phat[x] *
                                   tilde_u[u] * tilde_x[x] * tilde_yx[y * s.x_size + x];
                    if (denom <= 0.0)
                        throw SupportViolationError(
                            "oracle F undefined at tuple (y=" + std::to_string(y) +
                            ", x=" + std::to_string(x) + ", theta=" + std::to_string(t) +
                            ", u=" + std::to_string(u) + ")");
                    f.add(static_cast<long double>(w) * std::log(wx * wy * wt / denom));
                }
            }
        }
    }
    return f.value();
}

double oracle_complexity(const StructuredPosterior& post, const GenerativeModel& model,
                         std::size_t policy_index) {
    LinearModel lm(model);
    const PosteriorShape& s = post.shape();
    check_cap(lm.Oy * lm.Sx * lm.Th);
    std::vector<double> pxt = lm.p_x_theta(model.policies()[policy_index]);
    std::vector<int> xs, ys;
    Kahan c;
    for (std::size_t x = 0; x < s.x_size; ++x) {
        double wx = lin(post.log_q_x(policy_index, x));
        if (wx <= 0.0) continue;
        lm.decode_x(x, xs);
        for (std::size_t y = 0; y < s.y_size; ++y) {
            double wy = lin(post.log_q_y(x, y));
            if (wy <= 0.0) continue;
            lm.decode_y(y, ys);
            for (std::size_t t = 0; t < s.num_theta; ++t) {
                double wt = lin(post.log_q_theta(y, x, t));
                if (wt <= 0.0) continue;
                double p = pxt[x * s.num_theta + t] * lm.lik_traj(ys, xs, static_cast<int>(t));
                if (p <= 0.0)
                    throw SupportViolationError(
                        "oracle complexity undefined for policy " +
                        std::to_string(policy_index));
                c.add(static_cast<long double>(wx) * wy * wt *
                      std::log(wx * wy * wt / p));
            }
        }
    }
    return c.value();
}

std::vector<double> oracle_belief_update(const GenerativeModel& model, int action,
                                         int observation) {
    LinearModel lm(model);
    std::vector<double> post(static_cast<std::size_t>(lm.S) * lm.Th, 0.0);
    Kahan evidence;
    for (int x1 = 0; x1 < lm.S; ++x1)
        for (int t = 0; t < lm.Th; ++t) {
            Kahan acc;
            for (int x0 = 0; x0 < lm.S; ++x0)
                acc.add(static_cast<long double>(
                            lm.belief[static_cast<std::size_t>(x0) * lm.Th + t]) *
                        lm.trans[(static_cast<std::size_t>(action) * lm.S + x0) * lm.S + x1]);
            double v = acc.value() *
                       lm.lik[(static_cast<std::size_t>(t) * lm.S + x1) * lm.O + observation];
            post[static_cast<std::size_t>(x1) * lm.Th + t] = v;
            evidence.add(v);
        }
    if (evidence.value() <= 0.0)
        throw ImpossibleObservationError("oracle: observation has zero probability");
    for (double& v : post) v /= evidence.value();
    return post;
}

std::vector<double> oracle_predictive_joint(const GenerativeModel& model,
                                            const Policy& policy) {
    LinearModel lm(model);
    check_cap(lm.Oy * lm.Sx * lm.Th);
    std::vector<double> pxt = lm.p_x_theta(policy);
    std::vector<double> out(lm.Oy * lm.Sx * lm.Th, 0.0);
    std::vector<int> xs, ys;
    for (std::size_t y = 0; y < lm.Oy; ++y) {
        lm.decode_y(y, ys);
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            lm.decode_x(x, xs);
            for (int t = 0; t < lm.Th; ++t)
                out[(y * lm.Sx + x) * lm.Th + t] =
                    pxt[x * lm.Th + t] * lm.lik_traj(ys, xs, t);
        }
    }
    return out;
}

Categorical oracle_policy_posterior(const GenerativeModel& model,
                                    const PreferencePrior& pref, double resolution) {
    OracleExact ex(model);
    const LinearModel& lm = ex.lm;
    if (lm.U > 3)
        throw OracleCapacityError("grid search supports at most 3 policies");
    std::vector<double> phat = pref_traj(pref, lm);

    // Inner energies B(u) with unnormalized priors, all by direct sums.
    std::vector<double> tilde_u(lm.U);
    std::vector<double> px(lm.U * lm.Sx, 0.0);
    for (std::size_t u = 0; u < lm.U; ++u) {
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            double p = 0.0;
            for (int t = 0; t < lm.Th; ++t) p += ex.px_theta[u][x * lm.Th + t];
            px[u * lm.Sx + x] = p;
        }
        // normalize against accumulated rounding
        Kahan z;
        for (std::size_t x = 0; x < lm.Sx; ++x) z.add(px[u * lm.Sx + x]);
        for (std::size_t x = 0; x < lm.Sx; ++x) px[u * lm.Sx + x] /= z.value();
        Kahan h;
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            double p = px[u * lm.Sx + x];
            if (p > 0.0) h.add(-static_cast<long double>(p) * std::log(p));
        }
        tilde_u[u] = std::exp(h.value());
    }
    std::vector<double> tilde_x(lm.Sx, 1.0);
    for (std::size_t x = 0; x < lm.Sx; ++x) {
        Kahan h;
        for (std::size_t y = 0; y < lm.Oy; ++y) {
            double p = ex.q_y_x[x * lm.Oy + y];
            if (p > 0.0) h.add(-static_cast<long double>(p) * std::log(p));
        }
        tilde_x[x] = std::exp(-h.value());
    }
    std::vector<double> tilde_yx(lm.Oy * lm.Sx, 1.0);
    for (std::size_t y = 0; y < lm.Oy; ++y)
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            if (ex.q_y_x[x * lm.Oy + y] <= 0.0) continue;
            Kahan d;
            for (int t = 0; t < lm.Th; ++t) {
                double p = ex.q_theta_yx[(y * lm.Sx + x) * lm.Th + t];
                if (p > 0.0)
                    d.add(static_cast<long double>(p) *
                          std::log(p / ex.p_theta_x[x * lm.Th + t]));
            }
            tilde_yx[y * lm.Sx + x] = std::exp(d.value());
        }

    std::vector<int> xs, ys;
    std::vector<double> b(lm.U, 0.0);
    for (std::size_t u = 0; u < lm.U; ++u) {
        Kahan acc;
        for (std::size_t x = 0; x < lm.Sx; ++x) {
            double wx = px[u * lm.Sx + x];
            if (wx <= 0.0) continue;
            lm.decode_x(x, xs);
            for (std::size_t y = 0; y < lm.Oy; ++y) {
                double wy = ex.q_y_x[x * lm.Oy + y];
                if (wy <= 0.0) continue;
                lm.decode_y(y, ys);
                for (int t = 0; t < lm.Th; ++t) {
                    double wt = ex.q_theta_yx[(y * lm.Sx + x) * lm.Th + t];
                    if (wt <= 0.0) continue;
                    double denom = ex.px_theta[u][x * lm.Th + t] * lm.lik_traj(ys, xs, t) *
                                   phat[x] * tilde_u[u] * tilde_x[x] *
                                   tilde_yx[y * lm.Sx + x];
                    acc.add(static_cast<long double>(wx) * wy * wt *
                            std::log(wx * wy * wt / denom));
                }
            }
        }
        b[u] = acc.value();
    }

    auto f_of = [&](const std::vector<double>& q) {
        double f = 0.0;
        for (std::size_t u = 0; u < lm.U; ++u) {
            if (q[u] <= 0.0) continue;
            f += q[u] * (std::log(q[u] / lm.prior_u[u]) + b[u]);
        }
        return f;
    };

    const int steps = static_cast<int>(std::llround(1.0 / resolution));
    std::vector<double> best(lm.U, 1.0 / lm.U), cand(lm.U, 0.0);
    double best_f = f_of(best);
    if (lm.U == 1) {
        best = {1.0};
    } else if (lm.U == 2) {
        for (int i = 0; i <= steps; ++i) {
            cand[0] = static_cast<double>(i) / steps;
            cand[1] = 1.0 - cand[0];
            double f = f_of(cand);
            if (f < best_f) {
                best_f = f;
                best = cand;
            }
        }
    } else {
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; i + j <= steps; ++j) {
                cand[0] = static_cast<double>(i) / steps;
                cand[1] = static_cast<double>(j) / steps;
                cand[2] = 1.0 - cand[0] - cand[1];
                double f = f_of(cand);
                if (f < best_f) {
                    best_f = f;
                    best = cand;
                }
            }
    }
    return Categorical::from_probs(best);
}

} // namespace efeplan::oracle
