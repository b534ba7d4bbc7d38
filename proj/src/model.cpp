#include "efeplan/model.hpp"

#include <algorithm>
#include <cmath>

#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

std::vector<Policy> enumerate_policies(int num_actions, int horizon, std::size_t cap) {
    if (num_actions < 1 || horizon < 0)
        throw Error("enumerate_policies: invalid action count or horizon");
    double count = std::pow(static_cast<double>(num_actions), horizon);
    if (count > static_cast<double>(cap))
        throw PolicySpaceError("policy space of size " + std::to_string(static_cast<long long>(count)) +
                               " exceeds cap " + std::to_string(cap));
    std::size_t n = static_cast<std::size_t>(ipow(num_actions, horizon));
    std::vector<Policy> out;
    out.reserve(n);
    std::vector<int> actions(horizon, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        for (int k = horizon - 1; k >= 0; --k) {
            actions[k] = static_cast<int>(rem % num_actions);
            rem /= num_actions;
        }
        out.push_back(Policy{actions});
    }
    return out;
}

PreferencePrior PreferencePrior::per_step(std::vector<Categorical> targets) {
    for (const Categorical& c : targets)
        if (c.size() != targets.front().size())
            throw AxisError("PreferencePrior: inconsistent target sizes");
    return PreferencePrior(std::move(targets), Mode::per_step);
}

PreferencePrior PreferencePrior::final_step(const Categorical& target, int horizon) {
    if (horizon < 1) throw Error("PreferencePrior::final_step: horizon must be >= 1");
    std::vector<Categorical> steps;
    steps.reserve(horizon);
    for (int k = 0; k + 1 < horizon; ++k) steps.push_back(Categorical::uniform(target.size()));
    steps.push_back(target);
    return PreferencePrior(std::move(steps), Mode::final_step);
}

PreferencePrior PreferencePrior::drop_first() const {
    if (steps_.empty()) throw Error("PreferencePrior::drop_first: empty");
    return PreferencePrior(std::vector<Categorical>(steps_.begin() + 1, steps_.end()), mode_);
}

namespace {

std::vector<double> trajectory_log_table(const std::vector<Categorical>& steps) {
    const int horizon = static_cast<int>(steps.size());
    const std::size_t base = steps.empty() ? 1 : steps[0].size();
    std::size_t total = 1;
    for (int k = 0; k < horizon; ++k) total *= base;
    std::vector<double> out(total, 0.0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double lp = 0.0;
        for (int k = horizon - 1; k >= 0; --k) {
            lp += steps[k].log_prob(rem % base);
            rem /= base;
        }
        out[flat] = lp;
    }
    return out;
}

} // namespace

std::vector<double> PreferencePrior::log_trajectory_table() const {
    return trajectory_log_table(steps_);
}

ObsPreferencePrior ObsPreferencePrior::per_step(std::vector<Categorical> targets) {
    for (const Categorical& c : targets)
        if (c.size() != targets.front().size())
            throw AxisError("ObsPreferencePrior: inconsistent target sizes");
    return ObsPreferencePrior(std::move(targets));
}

std::vector<double> ObsPreferencePrior::log_trajectory_table() const {
    return trajectory_log_table(steps_);
}

namespace {

void check_rows_normalized(std::span<const double> table, std::size_t row_len,
                           const std::string& what) {
    for (std::size_t r = 0; r * row_len < table.size(); ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < row_len; ++j) s += table[r * row_len + j];
        if (std::fabs(s - 1.0) > 1e-9)
            throw ModelLoadError(what + ": row " + std::to_string(r) +
                                 " sums to " + std::to_string(s));
        for (std::size_t j = 0; j < row_len; ++j)
            if (table[r * row_len + j] < 0.0)
                throw ModelLoadError(what + ": negative entry in row " + std::to_string(r));
    }
}

} // namespace

GenerativeModel::GenerativeModel(const ModelParams& p) {
    if (p.num_states < 1 || p.num_obs < 1 || p.num_actions < 1 || p.num_theta < 1)
        throw ModelLoadError("model: all dimensions must be positive");
    if (p.horizon < 0) throw ModelLoadError("model: horizon must be >= 1");
    num_states_ = p.num_states;
    num_obs_ = p.num_obs;
    num_actions_ = p.num_actions;
    num_theta_ = p.num_theta;
    horizon_ = p.horizon;

    const std::size_t S = num_states_, O = num_obs_, A = num_actions_, Th = num_theta_;

    if (p.likelihood.size() != Th * S * O)
        throw ModelLoadError("model: likelihood table has wrong size");
    check_rows_normalized(p.likelihood, O, "likelihood");
    log_lik_ = logs_from_probs(p.likelihood);

    if (p.transition.size() != A * S * S)
        throw ModelLoadError("model: transition table has wrong size");
    check_rows_normalized(p.transition, S, "transition");
    log_trans_ = logs_from_probs(p.transition);

    if (!p.joint_belief.empty()) {
        if (p.joint_belief.size() != S * Th)
            throw ModelLoadError("model: joint belief has wrong size");
        check_rows_normalized(p.joint_belief, S * Th, "joint_belief");
        log_belief_ = logs_from_probs(p.joint_belief);
    } else {
        if (p.initial_state_probs.size() != S)
            throw ModelLoadError("model: initial state belief has wrong size");
        if (p.theta_probs.size() != Th)
            throw ModelLoadError("model: theta prior has wrong size");
        check_rows_normalized(p.initial_state_probs, S, "initial_state_belief");
        check_rows_normalized(p.theta_probs, Th, "theta_prior");
        log_belief_.assign(S * Th, kNegInf);
        for (std::size_t x = 0; x < S; ++x)
            for (std::size_t t = 0; t < Th; ++t)
                log_belief_[x * Th + t] =
                    log_from_prob(p.initial_state_probs[x]) + log_from_prob(p.theta_probs[t]);
    }

    if (!p.allowed_policies.empty()) {
        explicit_policy_list_ = true;
        for (const Policy& pol : p.allowed_policies) {
            if (static_cast<int>(pol.actions.size()) != horizon_)
                throw ModelLoadError("model: allowed policy has wrong length");
            for (int a : pol.actions)
                if (a < 0 || a >= num_actions_)
                    throw ModelLoadError("model: allowed policy action out of range");
        }
        policies_ = p.allowed_policies;
    } else {
        policies_ = enumerate_policies(num_actions_, horizon_, p.policy_cap);
    }

    if (!p.policy_prior.empty()) {
        if (p.policy_prior.size() != policies_.size())
            throw ModelLoadError("model: policy prior size does not match policy set");
        check_rows_normalized(p.policy_prior, p.policy_prior.size(), "policy_prior");
        log_policy_prior_ = logs_from_probs(p.policy_prior);
    } else {
        log_policy_prior_.assign(policies_.size(),
                                 -std::log(static_cast<double>(policies_.size())));
    }

    init_derived();
}

void GenerativeModel::init_derived() {
    x_traj_size_ = static_cast<std::size_t>(ipow(num_states_, horizon_));
    y_traj_size_ = static_cast<std::size_t>(ipow(num_obs_, horizon_));
}

Categorical GenerativeModel::policy_prior() const {
    return Categorical::from_log_probs(log_policy_prior_);
}

Categorical GenerativeModel::initial_state_belief() const {
    std::vector<double> lp(num_states_);
    for (int x = 0; x < num_states_; ++x) {
        std::span<const double> row(log_belief_.data() + static_cast<std::size_t>(x) * num_theta_,
                                    num_theta_);
        lp[x] = log_sum_exp(row);
    }
    return Categorical::from_log_probs(std::move(lp));
}

Categorical GenerativeModel::theta_prior() const {
    std::vector<double> cols(num_theta_, kNegInf);
    for (int t = 0; t < num_theta_; ++t) {
        std::vector<double> col(num_states_);
        for (int x = 0; x < num_states_; ++x)
            col[x] = log_belief_[static_cast<std::size_t>(x) * num_theta_ + t];
        cols[t] = log_sum_exp(col);
    }
    return Categorical::from_log_probs(std::move(cols));
}

void GenerativeModel::decode_x_traj(std::size_t flat, std::span<int> out) const {
    for (int k = horizon_ - 1; k >= 0; --k) {
        out[k] = static_cast<int>(flat % num_states_);
        flat /= num_states_;
    }
}

void GenerativeModel::decode_y_traj(std::size_t flat, std::span<int> out) const {
    for (int k = horizon_ - 1; k >= 0; --k) {
        out[k] = static_cast<int>(flat % num_obs_);
        flat /= num_obs_;
    }
}

std::vector<double> GenerativeModel::log_state_theta_given_policy(const Policy& policy) const {
    if (static_cast<int>(policy.actions.size()) != horizon_)
        throw Error("policy length does not match model horizon");
    const int S = num_states_, Th = num_theta_;
    std::vector<double> out(x_traj_size_ * Th, kNegInf);
    std::vector<int> xs(horizon_);
    std::vector<double> mix(S);
#pragma omp parallel for schedule(static) firstprivate(xs, mix) if (x_traj_size_ > 64)
    for (long long xf = 0; xf < static_cast<long long>(x_traj_size_); ++xf) {
        decode_x_traj(xf, xs);
        // Transition factors after the first step do not involve the
        // unknown initial state.
        double rest = 0.0;
        for (int k = 1; k < horizon_; ++k)
            rest += log_trans(policy.actions[k], xs[k - 1], xs[k]);
        if (rest == kNegInf) continue;
        for (int t = 0; t < Th; ++t) {
            for (int x0 = 0; x0 < S; ++x0) {
                double first = horizon_ > 0 ? log_trans(policy.actions[0], x0, xs[0]) : 0.0;
                mix[x0] = log_belief_[static_cast<std::size_t>(x0) * Th + t] + first;
            }
            out[static_cast<std::size_t>(xf) * Th + t] = rest + log_sum_exp(mix);
        }
    }
    return out;
}

double GenerativeModel::log_lik_trajectory(std::size_t y_flat, std::size_t x_flat,
                                           int theta) const {
    double lp = 0.0;
    std::size_t yr = y_flat, xr = x_flat;
    for (int k = horizon_ - 1; k >= 0; --k) {
        int y = static_cast<int>(yr % num_obs_);
        int x = static_cast<int>(xr % num_states_);
        yr /= num_obs_;
        xr /= num_states_;
        lp += log_lik(theta, x, y);
        if (lp == kNegInf) return kNegInf;
    }
    return lp;
}

JointTable GenerativeModel::predictive_joint(const Policy& policy) const {
    std::vector<double> xt = log_state_theta_given_policy(policy);
    const std::size_t Oy = y_traj_size_, Sx = x_traj_size_, Th = num_theta_;
    std::vector<double> logp(Oy * Sx * Th, kNegInf);
#pragma omp parallel for schedule(static) if (Sx > 64)
    for (long long xf = 0; xf < static_cast<long long>(Sx); ++xf)
        for (std::size_t yf = 0; yf < Oy; ++yf)
            for (std::size_t t = 0; t < Th; ++t) {
                double base = xt[static_cast<std::size_t>(xf) * Th + t];
                if (base == kNegInf) continue;
                logp[(yf * Sx + xf) * Th + t] =
                    base + log_lik_trajectory(yf, xf, static_cast<int>(t));
            }
    return JointTable::from_log_probs({Axis{"y", Oy}, Axis{"x", Sx}, Axis{"theta", Th}},
                                      std::move(logp));
}

JointTable GenerativeModel::predictive_joint_all() const {
    const std::size_t Oy = y_traj_size_, Sx = x_traj_size_, Th = num_theta_,
                      U = policies_.size();
    std::vector<double> logp(Oy * Sx * Th * U, kNegInf);
    for (std::size_t u = 0; u < U; ++u) {
        JointTable per = predictive_joint(policies_[u]);
        std::span<const double> src = per.log_probs();
        for (std::size_t f = 0; f < src.size(); ++f) {
            if (src[f] == kNegInf) continue;
            logp[f * U + u] = src[f] + log_policy_prior_[u];
        }
    }
    return JointTable::from_log_probs(
        {Axis{"y", Oy}, Axis{"x", Sx}, Axis{"theta", Th}, Axis{"u", U}}, std::move(logp));
}

JointTable GenerativeModel::posterior_belief(int action, int observation) const {
    if (horizon_ < 1) throw Error("belief update requires horizon >= 1");
    if (action < 0 || action >= num_actions_) throw Error("belief update: bad action index");
    if (observation < 0 || observation >= num_obs_)
        throw Error("belief update: bad observation index");
    const int S = num_states_, Th = num_theta_;
    std::vector<double> post(static_cast<std::size_t>(S) * Th, kNegInf);
    std::vector<double> mix(S);
    for (int x1 = 0; x1 < S; ++x1)
        for (int t = 0; t < Th; ++t) {
            for (int x0 = 0; x0 < S; ++x0)
                mix[x0] = log_belief_[static_cast<std::size_t>(x0) * Th + t] +
                          log_trans(action, x0, x1);
            post[static_cast<std::size_t>(x1) * Th + t] =
                log_sum_exp(mix) + log_lik(t, x1, observation);
        }
    double evidence = log_sum_exp(post);
    if (evidence == kNegInf)
        throw ImpossibleObservationError(
            "observation " + std::to_string(observation) +
            " has zero probability after action " + std::to_string(action));
    for (double& lp : post) lp -= evidence;
    return JointTable::from_log_probs(
        {Axis{"x", static_cast<std::size_t>(S)}, Axis{"theta", static_cast<std::size_t>(Th)}},
        std::move(post));
}

GenerativeModel GenerativeModel::belief_update(int action, int observation) const {
    JointTable post = posterior_belief(action, observation);

    GenerativeModel out;
    out.num_states_ = num_states_;
    out.num_obs_ = num_obs_;
    out.num_actions_ = num_actions_;
    out.num_theta_ = num_theta_;
    out.horizon_ = horizon_ - 1;
    out.log_lik_ = log_lik_;
    out.log_trans_ = log_trans_;
    out.log_belief_.assign(post.log_probs().begin(), post.log_probs().end());
    out.explicit_policy_list_ = explicit_policy_list_;

    // Condition the policy set on the executed first action: keep matching
    // policies, strip the first step, renormalize the prior.
    std::vector<double> kept_logp;
    for (std::size_t u = 0; u < policies_.size(); ++u) {
        if (policies_[u].actions.empty() || policies_[u].actions[0] != action) continue;
        out.policies_.push_back(
            Policy{std::vector<int>(policies_[u].actions.begin() + 1, policies_[u].actions.end())});
        kept_logp.push_back(log_policy_prior_[u]);
    }
    if (out.policies_.empty())
        throw Error("belief_update: no allowable policy starts with action " +
                    std::to_string(action));
    double norm = log_sum_exp(kept_logp);
    for (double& lp : kept_logp) lp -= norm;
    out.log_policy_prior_ = std::move(kept_logp);
    out.init_derived();
    return out;
}

} // namespace efeplan
