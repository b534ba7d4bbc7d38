#pragma once

#include <cstdint>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/model.hpp"
#include "efeplan/planner.hpp"
#include "efeplan/rng.hpp"

namespace efeplan {

/// A simulated discrete world with one true state and one true parameter
/// hypothesis. step() transitions the true state and samples an observation
/// from the declared tables; trajectories are reproducible from the seed.
class Environment {
public:
    Environment(int num_states, int num_obs, int num_actions,
                std::vector<double> transition, std::vector<double> likelihood,
                int initial_state, int true_theta, std::uint64_t seed);

    int true_state() const { return state_; }
    int true_theta() const { return true_theta_; }
    int num_actions() const { return num_actions_; }

    /// Applies an action; returns the sampled observation.
    int step(int action);

private:
    int num_states_, num_obs_, num_actions_;
    std::vector<double> transition_;  // [action][from][to], linear
    std::vector<double> likelihood_;  // [theta][state][obs], linear
    int state_;
    int true_theta_;
    Rng rng_;
};

/// One planning/acting/updating step of an episode.
struct EpisodeStep {
    int action = 0;
    int observation = 0;
    std::size_t chosen_policy = 0;
    Categorical q_star = Categorical::uniform(1);
    EfeBreakdown breakdown;
    double f_value = 0.0;
    Categorical state_belief = Categorical::uniform(1);  // after the update
    Categorical theta_belief = Categorical::uniform(1);
    int true_state_after = 0;
};

struct EpisodeLog {
    std::uint64_t seed = 0;
    Mode mode = Mode::full_efe;
    std::vector<EpisodeStep> steps;
    int final_true_state = 0;
    /// Log preference mass of the final true state under the last step's
    /// target (a reward proxy).
    double reward_proxy = 0.0;
};

enum class DecisionRule { argmax, sample };

/// Sliding-horizon loop: plan on the current model, execute the first
/// action of the selected policy, observe, update beliefs, shrink the
/// horizon, repeat. steps must not exceed the model horizon.
EpisodeLog run_episode(const GenerativeModel& model, const PreferencePrior& pref,
                       Environment env, Mode mode, DecisionRule rule, int steps,
                       std::uint64_t seed);

/// T-maze layout: four locations (center, left arm, right arm, cue), two
/// reward contexts as parameter hypotheses. The cue observation reveals the
/// context deterministically; arm observations are noisy reward/punishment
/// signals whose fidelity differs between the matching and mismatching arm;
/// arms are absorbing. Per-step preference mass concentrates on the arms.
struct TMazeSpec {
    static constexpr int kCenter = 0, kLeft = 1, kRight = 2, kCue = 3;
    static constexpr int kObsNeutral = 0, kObsReward = 1, kObsPunish = 2,
                         kObsCueLeft = 3, kObsCueRight = 4;
    static constexpr int kRewardLeft = 0, kRewardRight = 1;

    double match_reward_prob = 0.85;    // p(reward | arm matches context)
    double mismatch_reward_prob = 0.30; // p(reward | arm mismatches context)
    double pref_center = 0.055;
    double pref_arm = 0.36;
    double pref_cue = 0.225;
    int horizon = 2;
};

struct TMaze {
    GenerativeModel model;
    PreferencePrior pref;
    TMazeSpec spec;

    /// World with the true context drawn uniformly from the seed.
    Environment make_env(std::uint64_t seed) const;
    Environment make_env_with_theta(int true_theta, std::uint64_t seed) const;
};

TMaze build_tmaze(const TMazeSpec& spec = {});

/// Gridworld with 4-connected moves. slip_prob is both the probability that
/// a move fails (the agent stays put) and the position-observation noise
/// rate, so slip 0 means exact odometry. Preference concentrates on the
/// goal cell at the final step.
struct Gridworld {
    GenerativeModel model;
    PreferencePrior pref;
    int width = 0, height = 0, start = 0, goal = 0;

    Environment make_env(std::uint64_t seed) const;
};

Gridworld build_gridworld(int width, int height, double slip_prob, int goal,
                          int horizon, int start = 0);

} // namespace efeplan
