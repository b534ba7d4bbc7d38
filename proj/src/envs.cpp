#include "efeplan/envs.hpp"

#include <algorithm>
#include <cmath>

#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"
#include "efeplan/posterior.hpp"

namespace efeplan {

Environment::Environment(int num_states, int num_obs, int num_actions,
                         std::vector<double> transition, std::vector<double> likelihood,
                         int initial_state, int true_theta, std::uint64_t seed)
    : num_states_(num_states),
      num_obs_(num_obs),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      likelihood_(std::move(likelihood)),
      state_(initial_state),
      true_theta_(true_theta),
      rng_(seed) {
    if (transition_.size() !=
        static_cast<std::size_t>(num_actions_) * num_states_ * num_states_)
        throw Error("Environment: transition table size mismatch");
    if (likelihood_.size() % (static_cast<std::size_t>(num_states_) * num_obs_) != 0)
        throw Error("Environment: likelihood table size mismatch");
    if (initial_state < 0 || initial_state >= num_states_)
        throw Error("Environment: bad initial state");
}

int Environment::step(int action) {
    if (action < 0 || action >= num_actions_) throw Error("Environment: bad action");
    std::span<const double> row(
        transition_.data() + (static_cast<std::size_t>(action) * num_states_ + state_) *
                                 num_states_,
        num_states_);
    state_ = static_cast<int>(rng_.categorical(row));
    std::span<const double> obs_row(
        likelihood_.data() +
            (static_cast<std::size_t>(true_theta_) * num_states_ + state_) * num_obs_,
        num_obs_);
    return static_cast<int>(rng_.categorical(obs_row));
}

EpisodeLog run_episode(const GenerativeModel& model, const PreferencePrior& pref,
                       Environment env, Mode mode, DecisionRule rule, int steps,
                       std::uint64_t seed) {
    if (steps > model.horizon())
        throw Error("run_episode: steps exceed the model horizon");

    EpisodeLog log;
    log.seed = seed;
    log.mode = mode;
    Rng decision_rng(seed ^ 0x9e3779b97f4a7c15ULL);

    GenerativeModel current = model;
    PreferencePrior current_pref = pref;

    for (int s = 0; s < steps; ++s) {
        PlannerResult plan = optimal_policy(current, current_pref, mode);

        std::size_t chosen = 0;
        if (rule == DecisionRule::argmax) {
            std::span<const double> lp = plan.q_star.log_probs();
            chosen = static_cast<std::size_t>(
                std::max_element(lp.begin(), lp.end()) - lp.begin());
        } else {
            chosen = decision_rng.categorical(plan.q_star.probs());
        }
        int action = current.policies()[chosen].actions[0];
        int observation = env.step(action);

        JointTable belief = current.posterior_belief(action, observation);
        EpisodeStep step;
        step.action = action;
        step.observation = observation;
        step.chosen_policy = chosen;
        step.q_star = plan.q_star;
        step.breakdown = plan.breakdown;
        step.f_value = plan.f_value;
        step.state_belief = belief.marginal_categorical("x");
        step.theta_belief = belief.marginal_categorical("theta");
        step.true_state_after = env.true_state();
        log.steps.push_back(std::move(step));

        if (s + 1 < steps) {
            current = current.belief_update(action, observation);
            current_pref = current_pref.drop_first();
        }
    }

    log.final_true_state = env.true_state();
    log.reward_proxy =
        steps > 0 ? pref.step(steps - 1).log_prob(log.final_true_state) : 0.0;
    return log;
}

TMaze build_tmaze(const TMazeSpec& spec) {
    const int S = 4, O = 5, A = 4, Th = 2;
    if (spec.horizon < 1) throw Error("build_tmaze: horizon must be >= 1");

    std::vector<double> lik(Th * S * O, 0.0);
    auto L = [&](int th, int x, int y) -> double& {
        return lik[(static_cast<std::size_t>(th) * S + x) * O + y];
    };
    for (int th = 0; th < Th; ++th) {
        L(th, TMazeSpec::kCenter, TMazeSpec::kObsNeutral) = 1.0;
        L(th, TMazeSpec::kCue,
          th == TMazeSpec::kRewardLeft ? TMazeSpec::kObsCueLeft : TMazeSpec::kObsCueRight) =
            1.0;
        for (int arm : {TMazeSpec::kLeft, TMazeSpec::kRight}) {
            bool matches = (arm == TMazeSpec::kLeft) == (th == TMazeSpec::kRewardLeft);
            double pr = matches ? spec.match_reward_prob : spec.mismatch_reward_prob;
            L(th, arm, TMazeSpec::kObsReward) = pr;
            L(th, arm, TMazeSpec::kObsPunish) = 1.0 - pr;
        }
    }

    // Moves are deterministic from center and cue; arms are absorbing.
    std::vector<double> trans(A * S * S, 0.0);
    auto T = [&](int a, int from, int to) -> double& {
        return trans[(static_cast<std::size_t>(a) * S + from) * S + to];
    };
    for (int a = 0; a < A; ++a)
        for (int from = 0; from < S; ++from) {
            int to = (from == TMazeSpec::kLeft || from == TMazeSpec::kRight) ? from : a;
            T(a, from, to) = 1.0;
        }

    ModelParams p;
    p.num_states = S;
    p.num_obs = O;
    p.num_actions = A;
    p.num_theta = Th;
    p.horizon = spec.horizon;
    p.initial_state_probs = {1.0, 0.0, 0.0, 0.0};
    p.theta_probs = {0.5, 0.5};
    p.likelihood = lik;
    p.transition = trans;

    std::vector<double> step_pref = {spec.pref_center, spec.pref_arm, spec.pref_arm,
                                     spec.pref_cue};
    double mass = 0.0;
    for (double v : step_pref) mass += v;
    if (std::fabs(mass - 1.0) > 1e-9)
        throw Error("build_tmaze: preference masses must sum to 1");
    std::vector<Categorical> steps(spec.horizon, Categorical::from_probs(step_pref));

    return TMaze{GenerativeModel(p), PreferencePrior::per_step(std::move(steps)), spec};
}

Environment TMaze::make_env(std::uint64_t seed) const {
    Rng rng(seed * 0x2545f4914f6cdd1dULL + 1);
    int theta = static_cast<int>(rng.uniform_int(2));
    return make_env_with_theta(theta, seed);
}

Environment TMaze::make_env_with_theta(int true_theta, std::uint64_t seed) const {
    return Environment(model.num_states(), model.num_obs(), model.num_actions(),
                       probs_from_logs(model.log_transition()),
                       probs_from_logs(model.log_likelihood()), TMazeSpec::kCenter,
                       true_theta, seed);
}

Gridworld build_gridworld(int width, int height, double slip_prob, int goal, int horizon,
                          int start) {
    const int S = width * height;
    if (width < 1 || height < 1 || S > 36)
        throw Error("build_gridworld: grid must have between 1 and 36 cells");
    if (slip_prob < 0.0 || slip_prob > 0.5)
        throw Error("build_gridworld: slip probability must lie in [0, 0.5]");
    if (goal < 0 || goal >= S || start < 0 || start >= S)
        throw Error("build_gridworld: start/goal out of range");
    const int A = 4;  // N, S, E, W

    std::vector<double> trans(A * S * S, 0.0);
    auto T = [&](int a, int from, int to) -> double& {
        return trans[(static_cast<std::size_t>(a) * S + from) * S + to];
    };
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, 1, -1};
    for (int a = 0; a < A; ++a)
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                int from = r * width + c;
                int nr = r + dr[a], nc = c + dc[a];
                int to = (nr < 0 || nr >= height || nc < 0 || nc >= width)
                             ? from
                             : nr * width + nc;
                T(a, from, to) += 1.0 - slip_prob;
                T(a, from, from) += slip_prob;
            }

    // Observation: the true cell with probability 1 - slip, otherwise
    // uniform over the other cells (position-independent noise).
    std::vector<double> lik(S * S, 0.0);
    for (int x = 0; x < S; ++x)
        for (int y = 0; y < S; ++y)
            lik[static_cast<std::size_t>(x) * S + y] =
                x == y ? 1.0 - slip_prob
                       : (S > 1 ? slip_prob / (S - 1) : 0.0);
    if (S == 1) lik[0] = 1.0;

    ModelParams p;
    p.num_states = S;
    p.num_obs = S;
    p.num_actions = A;
    p.num_theta = 1;
    p.horizon = horizon;
    p.initial_state_probs.assign(S, 0.0);
    p.initial_state_probs[start] = 1.0;
    p.theta_probs = {1.0};
    p.likelihood = lik;
    p.transition = trans;

    // Soft goal target: every non-goal cell keeps 1e-3 mass.
    std::vector<double> target(S, 1e-3);
    target[goal] = 1.0 - 1e-3 * (S - 1);
    PreferencePrior pref =
        PreferencePrior::final_step(Categorical::from_probs(target), horizon);

    return Gridworld{GenerativeModel(p), std::move(pref), width, height, start, goal};
}

Environment Gridworld::make_env(std::uint64_t seed) const {
    return Environment(model.num_states(), model.num_obs(), model.num_actions(),
                       probs_from_logs(model.log_transition()),
                       probs_from_logs(model.log_likelihood()), start, 0, seed);
}

} // namespace efeplan
