// Timing comparison between the parallel main path and the serial
// brute-force reference on a model large enough to exercise the kernels:
// per-trajectory summaries, per-policy EFE terms, and the full free-energy
// sum. Also reports the agreement between the two paths.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "efeplan/efe.hpp"
#include "efeplan/model.hpp"
#include "efeplan/oracle.hpp"
#include "efeplan/planner.hpp"
#include "efeplan/posterior.hpp"
#include "efeplan/random_models.hpp"
#include "efeplan/rng.hpp"

using namespace efeplan;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

GenerativeModel make_bench_model() {
    // 8 states, 8 observations, 2 hypotheses, horizon 3, 4 actions:
    // 512 state trajectories x 512 observation trajectories x 2 hypotheses
    // per policy, 64 policies.
    Rng rng(424242);
    ModelParams p;
    p.num_states = 8;
    p.num_obs = 8;
    p.num_actions = 4;
    p.num_theta = 2;
    p.horizon = 3;
    auto rows = [&rng](std::size_t n_rows, std::size_t n_cols) {
        std::vector<double> t(n_rows * n_cols);
        for (std::size_t r = 0; r < n_rows; ++r)
            rng.dirichlet1(std::span<double>(t.data() + r * n_cols, n_cols));
        return t;
    };
    p.likelihood = rows(static_cast<std::size_t>(p.num_theta) * p.num_states, p.num_obs);
    p.transition = rows(static_cast<std::size_t>(p.num_actions) * p.num_states, p.num_states);
    p.initial_state_probs = rows(1, p.num_states);
    p.theta_probs = rows(1, p.num_theta);
    return GenerativeModel(p);
}

} // namespace

int main() {
    GenerativeModel model = make_bench_model();
    PreferencePrior pref = make_random_preference(99, model);

    std::printf("model: %d states, %d obs, %d theta, horizon %d -> %zu x-traj, %zu y-traj, %zu policies\n",
                model.num_states(), model.num_obs(), model.num_theta(), model.horizon(),
                model.num_x_trajectories(), model.num_y_trajectories(),
                model.num_policies());
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled at build time\n");
#endif

    auto t0 = Clock::now();
    StructuredPosterior post = exact_posterior(model);
    double t_post = seconds_since(t0);

    t0 = Clock::now();
    PosteriorSummaries sum = summarize(post);
    EfeBreakdown br = efe(post, pref, sum);
    double t_efe = seconds_since(t0);

    t0 = Clock::now();
    double f_main = vfe(post, model, pref, PriorVariant::unnormalized);
    double t_vfe = seconds_since(t0);

#ifdef _OPENMP
    omp_set_num_threads(1);
    t0 = Clock::now();
    StructuredPosterior post1 = exact_posterior(model);
    PosteriorSummaries sum1 = summarize(post1);
    EfeBreakdown br1 = efe(post1, pref, sum1);
    double t_efe1 = seconds_since(t0);
    t0 = Clock::now();
    double f_main1 = vfe(post1, model, pref, PriorVariant::unnormalized);
    double t_vfe1 = seconds_since(t0);
    omp_set_num_threads(omp_get_num_procs());
    double thread_delta = std::fabs(f_main - f_main1);
    for (std::size_t u = 0; u < br.total.size(); ++u)
        thread_delta = std::max(thread_delta, std::fabs(br.total[u] - br1.total[u]));
    std::printf("1-thread main path:   posterior+efe %.3fs, vfe %.3fs (max |delta| vs parallel %.3g)\n",
                t_efe1, t_vfe1, thread_delta);
#endif

    std::printf("parallel main path:   posterior %.3fs, efe %.3fs, vfe %.3fs\n", t_post,
                t_efe, t_vfe);

    // Serial reference on a subset of policies (it enumerates every outcome
    // tuple; scale the timing to the full set).
    const std::size_t ref_policies = 8;
    t0 = Clock::now();
    double worst = 0.0;
    for (std::size_t u = 0; u < ref_policies; ++u) {
        oracle::OracleEfe ref = oracle::oracle_efe(model, pref, model.policies()[u]);
        worst = std::max(worst, std::fabs(ref.total - br.total[u]));
    }
    double t_ref = seconds_since(t0);
    std::printf("serial reference:     %zu/%zu policies in %.3fs (est. full set %.3fs)\n",
                ref_policies, model.num_policies(), t_ref,
                t_ref * static_cast<double>(model.num_policies()) / ref_policies);
    std::printf("agreement:            max |main - reference| = %.3g\n", worst);
    std::printf("f_value (main):       %.12f\n", f_main);
    return worst < 1e-9 ? 0 : 1;
}
