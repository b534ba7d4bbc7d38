#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/joint_table.hpp"

namespace efeplan {

inline constexpr std::size_t kDefaultPolicyCap = 4096;

/// Open-loop sequence of action indices, one per future step.
struct Policy {
    std::vector<int> actions;

    bool operator==(const Policy&) const = default;
};

/// Enumerates all action sequences of the given length in lexicographic
/// order. Throws PolicySpaceError when the count exceeds cap.
std::vector<Policy> enumerate_policies(int num_actions, int horizon,
                                       std::size_t cap = kDefaultPolicyCap);

/// Per-step preference over future states. The trajectory-level prior is
/// the product of the per-step factors, so it stays normalized over the
/// trajectory space. final_step places the target on the last step and
/// completes earlier steps with uniform factors.
class PreferencePrior {
public:
    enum class Mode { per_step, final_step };

    static PreferencePrior per_step(std::vector<Categorical> targets);
    static PreferencePrior final_step(const Categorical& target, int horizon);

    int horizon() const { return static_cast<int>(steps_.size()); }
    int num_states() const { return steps_.empty() ? 0 : static_cast<int>(steps_[0].size()); }
    Mode mode() const { return mode_; }
    const Categorical& step(int k) const { return steps_[k]; }

    /// Drops the first step (used when the planning horizon shrinks).
    PreferencePrior drop_first() const;

    /// log p-hat over flattened state trajectories, size num_states^horizon.
    std::vector<double> log_trajectory_table() const;

private:
    PreferencePrior(std::vector<Categorical> steps, Mode mode)
        : steps_(std::move(steps)), mode_(mode) {}

    std::vector<Categorical> steps_;
    Mode mode_ = Mode::per_step;
};

/// Per-step preference over future observations (the G-prime variant).
class ObsPreferencePrior {
public:
    static ObsPreferencePrior per_step(std::vector<Categorical> targets);

    int horizon() const { return static_cast<int>(steps_.size()); }
    int num_obs() const { return steps_.empty() ? 0 : static_cast<int>(steps_[0].size()); }
    const Categorical& step(int k) const { return steps_[k]; }

    std::vector<double> log_trajectory_table() const;

private:
    explicit ObsPreferencePrior(std::vector<Categorical> steps) : steps_(std::move(steps)) {}
    std::vector<Categorical> steps_;
};

/// Linear-domain inputs for building a GenerativeModel. Tables are nested
/// row-major: likelihood[theta][state][obs], transition[action][from][to].
/// Either joint_belief (states x theta, state-major) or the pair
/// initial_state_probs / theta_probs must be provided.
struct ModelParams {
    int num_states = 0;
    int num_obs = 0;
    int num_actions = 0;
    int num_theta = 1;
    int horizon = 1;
    std::vector<double> initial_state_probs;
    std::vector<double> theta_probs;
    std::vector<double> joint_belief;
    std::vector<double> likelihood;
    std::vector<double> transition;
    std::vector<double> policy_prior;       // optional; default uniform
    std::vector<Policy> allowed_policies;   // optional; default exhaustive
    std::size_t policy_cap = kDefaultPolicyCap;
};

/// Rollout model over a finite future horizon: a belief over the current
/// state and parameter hypothesis, a parameter-conditioned likelihood, an
/// action-conditioned transition, and a prior over the policy set.
/// Parameter hypotheses modulate the likelihood only. Immutable once built.
class GenerativeModel {
public:
    explicit GenerativeModel(const ModelParams& params);

    int num_states() const { return num_states_; }
    int num_obs() const { return num_obs_; }
    int num_actions() const { return num_actions_; }
    int num_theta() const { return num_theta_; }
    int horizon() const { return horizon_; }

    std::size_t num_x_trajectories() const { return x_traj_size_; }
    std::size_t num_y_trajectories() const { return y_traj_size_; }
    std::size_t num_policies() const { return policies_.size(); }
    const std::vector<Policy>& policies() const { return policies_; }

    Categorical policy_prior() const;
    Categorical initial_state_belief() const;
    Categorical theta_prior() const;

    /// Joint belief over (current state, theta), state-major, log domain.
    std::span<const double> log_belief() const { return log_belief_; }
    std::span<const double> log_likelihood() const { return log_lik_; }
    std::span<const double> log_transition() const { return log_trans_; }
    double log_policy_prior(std::size_t u) const { return log_policy_prior_[u]; }

    double log_lik(int theta, int state, int obs) const {
        return log_lik_[(static_cast<std::size_t>(theta) * num_states_ + state) * num_obs_ + obs];
    }
    double log_trans(int action, int from, int to) const {
        return log_trans_[(static_cast<std::size_t>(action) * num_states_ + from) * num_states_ + to];
    }

    /// Decodes a flat trajectory index (first step most significant).
    void decode_x_traj(std::size_t flat, std::span<int> out) const;
    void decode_y_traj(std::size_t flat, std::span<int> out) const;

    /// log p(x-trajectory, theta | policy), x-major over theta,
    /// size num_x_trajectories * num_theta. The initial state is summed out.
    std::vector<double> log_state_theta_given_policy(const Policy& policy) const;

    /// Trajectory likelihood log p(y-traj | x-traj, theta) for flat indices.
    double log_lik_trajectory(std::size_t y_flat, std::size_t x_flat, int theta) const;

    /// Exact predictive joint p(y, x, theta | policy) over flattened
    /// trajectory axes, normalized within 1e-12.
    JointTable predictive_joint(const Policy& policy) const;

    /// Exact joint p(y, x, theta, u) including the policy prior.
    JointTable predictive_joint_all() const;

    /// Posterior over (next state, theta) after executing an action and
    /// observing an outcome, as a JointTable with axes (x, theta). Throws
    /// ImpossibleObservationError when the observation has zero predictive
    /// probability.
    JointTable posterior_belief(int action, int observation) const;

    /// Bayes update: returns a model with horizon reduced by one, the
    /// belief replaced by posterior_belief, and the policy set conditioned
    /// on the executed first action.
    GenerativeModel belief_update(int action, int observation) const;

private:
    GenerativeModel() = default;
    void init_derived();

    int num_states_ = 0, num_obs_ = 0, num_actions_ = 0, num_theta_ = 1, horizon_ = 0;
    std::size_t x_traj_size_ = 1, y_traj_size_ = 1;
    std::vector<double> log_belief_;
    std::vector<double> log_lik_;
    std::vector<double> log_trans_;
    std::vector<Policy> policies_;
    std::vector<double> log_policy_prior_;
    bool explicit_policy_list_ = false;
};

} // namespace efeplan
