#include <cmath>

#include <doctest.h>

#include "efeplan/errors.hpp"
#include "efeplan/oracle.hpp"
#include "efeplan/random_models.hpp"

using namespace efeplan;

TEST_CASE("reference report rows") {
    oracle::OracleReport r = oracle::make_report("x", 1.0, 1.0 + 5e-11, 1e-10);
    CHECK(r.pass);
    CHECK(r.abs_diff == doctest::Approx(5e-11));
    oracle::OracleReport bad = oracle::make_report("x", 1.0, 1.1, 1e-10);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("internal cross-check: two ambiguity routes agree") {
    for (std::uint64_t seed = 40; seed < 52; ++seed) {
        GenerativeModel m = make_random_model(seed, RandomModelCaps{3, 3, 3, 2, 4});
        PreferencePrior pref = make_random_preference(seed, m);
        for (const Policy& pol : m.policies()) {
            oracle::OracleEfe ref = oracle::oracle_efe(m, pref, pol);
            CHECK(std::fabs(ref.ambiguity - ref.ambiguity_alt) < 1e-12);
        }
    }
}

TEST_CASE("degenerate chain gives all-zero components") {
    ModelParams p;
    p.num_states = 2;
    p.num_obs = 2;
    p.num_actions = 1;
    p.num_theta = 1;
    p.horizon = 2;
    p.initial_state_probs = {1, 0};
    p.theta_probs = {1};
    p.likelihood = {1, 0, 0, 1};
    p.transition = {0, 1, 1, 0};
    GenerativeModel m(p);
    // trajectory visits 1 then 0; give those steps full preference mass
    PreferencePrior pref = PreferencePrior::per_step(
        {Categorical::point_mass(2, 1), Categorical::point_mass(2, 0)});
    oracle::OracleEfe ref = oracle::oracle_efe(m, pref, m.policies()[0]);
    CHECK(ref.risk == doctest::Approx(0.0));
    CHECK(ref.ambiguity == doctest::Approx(0.0));
    CHECK(ref.novelty == doctest::Approx(0.0));
}

TEST_CASE("grid search is capped at three policies") {
    GenerativeModel m = make_random_model(3);  // up to 5 policies
    if (m.num_policies() > 3)
        CHECK_THROWS_AS(
            oracle::oracle_policy_posterior(m, make_random_preference(3, m), 1e-2),
            OracleCapacityError);
}

TEST_CASE("grid search finds the symmetric optimum") {
    // symmetric two-policy model: grid minimizer should sit at the prior
    ModelParams p;
    p.num_states = 2;
    p.num_obs = 2;
    p.num_actions = 2;
    p.num_theta = 1;
    p.horizon = 1;
    p.initial_state_probs = {.5, .5};
    p.theta_probs = {1};
    p.likelihood = {.7, .3, .2, .8};
    p.transition = {.6, .4, .3, .7, .6, .4, .3, .7};
    GenerativeModel m(p);
    std::vector<Categorical> steps{Categorical::uniform(2)};
    PreferencePrior pref = PreferencePrior::per_step(steps);
    Categorical grid = oracle::oracle_policy_posterior(m, pref, 1e-3);
    CHECK(std::fabs(grid.prob(0) - 0.5) <= 1e-3);
}
