#pragma once

#include <cstdint>
#include <vector>

#include "efeplan/model.hpp"
#include "efeplan/rng.hpp"

namespace efeplan {

/// Size envelope for seeded random test models.
struct RandomModelCaps {
    int max_states = 4;
    int max_obs = 3;
    int max_theta = 3;
    int max_horizon = 2;
    int max_policies = 5;
};

/// Fully supported random model: every table row is a Dirichlet(1) draw,
/// sizes drawn uniformly within the caps. Deterministic in the seed.
inline GenerativeModel make_random_model(std::uint64_t seed,
                                         const RandomModelCaps& caps = {}) {
    Rng rng(seed);
    ModelParams p;
    p.num_states = 2 + static_cast<int>(rng.uniform_int(caps.max_states - 1));
    p.num_obs = 2 + static_cast<int>(rng.uniform_int(caps.max_obs - 1));
    p.num_theta = 1 + static_cast<int>(rng.uniform_int(caps.max_theta));
    p.horizon = 1 + static_cast<int>(rng.uniform_int(caps.max_horizon));
    // Keep the policy set within the cap: horizon 1 admits wider action sets.
    int max_actions = 2;
    while (ipow(max_actions + 1, p.horizon) <= caps.max_policies) ++max_actions;
    p.num_actions = 2 + static_cast<int>(rng.uniform_int(max_actions - 1));

    auto rows = [&rng](std::size_t n_rows, std::size_t n_cols) {
        std::vector<double> t(n_rows * n_cols);
        for (std::size_t r = 0; r < n_rows; ++r)
            rng.dirichlet1(std::span<double>(t.data() + r * n_cols, n_cols));
        return t;
    };

    const std::size_t S = p.num_states, O = p.num_obs, A = p.num_actions,
                      Th = p.num_theta;
    p.likelihood = rows(Th * S, O);
    p.transition = rows(A * S, S);
    p.initial_state_probs = rows(1, S);
    p.theta_probs = rows(1, Th);
    std::size_t n_policies = static_cast<std::size_t>(ipow(p.num_actions, p.horizon));
    p.policy_prior = rows(1, n_policies);
    return GenerativeModel(p);
}

/// Strictly positive per-step random preference for the model's state space.
inline PreferencePrior make_random_preference(std::uint64_t seed,
                                              const GenerativeModel& model) {
    Rng rng(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    std::vector<Categorical> steps;
    std::vector<double> row(model.num_states());
    for (int k = 0; k < model.horizon(); ++k) {
        rng.dirichlet1(row);
        steps.push_back(Categorical::from_probs(row));
    }
    return PreferencePrior::per_step(std::move(steps));
}

inline ObsPreferencePrior make_random_obs_preference(std::uint64_t seed,
                                                     const GenerativeModel& model) {
    Rng rng(seed ^ 0x5a5a5a5a5a5a5a5aULL);
    std::vector<Categorical> steps;
    std::vector<double> row(model.num_obs());
    for (int k = 0; k < model.horizon(); ++k) {
        rng.dirichlet1(row);
        steps.push_back(Categorical::from_probs(row));
    }
    return ObsPreferencePrior::per_step(std::move(steps));
}

} // namespace efeplan
