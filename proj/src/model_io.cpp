#include "efeplan/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelLoadError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelLoadError("'" + path + "': " + e.what());
    }
    return j;
}

std::vector<double> flatten_numbers(const json& node, const std::string& what) {
    std::vector<double> out;
    std::function<void(const json&)> walk = [&](const json& n) {
        if (n.is_array()) {
            for (const auto& c : n) walk(c);
        } else if (n.is_number()) {
            out.push_back(n.get<double>());
        } else {
            throw ModelLoadError(what + ": expected nested arrays of numbers");
        }
    };
    walk(node);
    return out;
}

std::vector<Categorical> parse_step_targets(const json& node, const std::string& what) {
    if (!node.is_array() || node.empty() || !node[0].is_array())
        throw ModelLoadError(what + ": expected an array of per-step rows");
    std::vector<Categorical> steps;
    for (std::size_t k = 0; k < node.size(); ++k) {
        std::vector<double> row = flatten_numbers(node[k], what);
        double s = 0.0;
        for (double v : row) s += v;
        if (std::fabs(s - 1.0) > 1e-9)
            throw ModelLoadError(what + ": row " + std::to_string(k) + " sums to " +
                                 std::to_string(s));
        steps.push_back(Categorical::from_probs(row));
    }
    return steps;
}

json preference_to_json(const PreferencePrior& pref) {
    json targets = json::array();
    for (int k = 0; k < pref.horizon(); ++k) targets.push_back(pref.step(k).probs());
    return json{{"mode", pref.mode() == PreferencePrior::Mode::final_step ? "final_step"
                                                                          : "per_step"},
                {"targets", targets}};
}

} // namespace

ModelFile parse_model_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelLoadError(origin + ": " + e.what());
    }

    ModelParams p;
    try {
        p.num_states = j.at("num_states").get<int>();
        p.num_obs = j.at("num_obs").get<int>();
        p.num_actions = j.at("num_actions").get<int>();
        p.num_theta = j.value("num_theta", 1);
        p.horizon = j.at("horizon").get<int>();
        p.likelihood = flatten_numbers(j.at("likelihood"), "likelihood");
        p.transition = flatten_numbers(j.at("transition"), "transition");
        if (j.contains("joint_belief"))
            p.joint_belief = flatten_numbers(j["joint_belief"], "joint_belief");
        if (j.contains("initial_state_belief"))
            p.initial_state_probs =
                flatten_numbers(j["initial_state_belief"], "initial_state_belief");
        if (j.contains("theta_prior"))
            p.theta_probs = flatten_numbers(j["theta_prior"], "theta_prior");
        if (j.contains("policy_prior"))
            p.policy_prior = flatten_numbers(j["policy_prior"], "policy_prior");
        if (j.contains("allowed_policies")) {
            for (const auto& row : j["allowed_policies"]) {
                Policy pol;
                for (const auto& a : row) pol.actions.push_back(a.get<int>());
                p.allowed_policies.push_back(std::move(pol));
            }
        }
        if (j.contains("policy_cap")) p.policy_cap = j["policy_cap"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw ModelLoadError(origin + ": " + e.what());
    }

    ModelFile out{GenerativeModel(p), std::nullopt, std::nullopt};

    if (j.contains("preference")) {
        const json& pj = j["preference"];
        std::string mode = pj.value("mode", "per_step");
        if (mode == "final_step") {
            std::vector<double> row = flatten_numbers(pj.at("target"), "preference.target");
            out.preference =
                PreferencePrior::final_step(Categorical::from_probs(row), p.horizon);
        } else {
            std::vector<Categorical> steps =
                parse_step_targets(pj.at("targets"), "preference.targets");
            if (static_cast<int>(steps.size()) != p.horizon)
                throw ModelLoadError(origin + ": preference length != horizon");
            out.preference = PreferencePrior::per_step(std::move(steps));
        }
    }
    if (j.contains("obs_preference")) {
        std::vector<Categorical> steps = parse_step_targets(
            j["obs_preference"].at("targets"), "obs_preference.targets");
        if (static_cast<int>(steps.size()) != p.horizon)
            throw ModelLoadError(origin + ": obs_preference length != horizon");
        out.obs_preference = ObsPreferencePrior::per_step(std::move(steps));
    }
    return out;
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelLoadError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_json(ss.str(), path);
}

std::string model_to_json(const GenerativeModel& m, const PreferencePrior* pref,
                          const ObsPreferencePrior* obs_pref) {
    const int S = m.num_states(), O = m.num_obs(), A = m.num_actions(),
              Th = m.num_theta();
    json j;
    j["schema_version"] = kSchemaVersion;
    j["num_states"] = S;
    j["num_obs"] = O;
    j["num_actions"] = A;
    j["num_theta"] = Th;
    j["horizon"] = m.horizon();

    json lik = json::array();
    for (int t = 0; t < Th; ++t) {
        json per_state = json::array();
        for (int x = 0; x < S; ++x) {
            json row = json::array();
            for (int y = 0; y < O; ++y) row.push_back(prob_from_log(m.log_lik(t, x, y)));
            per_state.push_back(row);
        }
        lik.push_back(per_state);
    }
    j["likelihood"] = lik;

    json trans = json::array();
    for (int a = 0; a < A; ++a) {
        json per_from = json::array();
        for (int x = 0; x < S; ++x) {
            json row = json::array();
            for (int x2 = 0; x2 < S; ++x2)
                row.push_back(prob_from_log(m.log_trans(a, x, x2)));
            per_from.push_back(row);
        }
        trans.push_back(per_from);
    }
    j["transition"] = trans;

    json belief = json::array();
    for (int x = 0; x < S; ++x) {
        json row = json::array();
        for (int t = 0; t < Th; ++t)
            row.push_back(prob_from_log(m.log_belief()[static_cast<std::size_t>(x) * Th + t]));
        belief.push_back(row);
    }
    j["joint_belief"] = belief;
    j["policy_prior"] = m.policy_prior().probs();

    if (pref) j["preference"] = preference_to_json(*pref);
    if (obs_pref) {
        json targets = json::array();
        for (int k = 0; k < obs_pref->horizon(); ++k)
            targets.push_back(obs_pref->step(k).probs());
        j["obs_preference"] = json{{"targets", targets}};
    }
    return j.dump(2) + "\n";
}

void save_model_file(const std::string& path, const GenerativeModel& model,
                     const PreferencePrior* pref, const ObsPreferencePrior* obs_pref) {
    write_text_file(path, model_to_json(model, pref, obs_pref));
}

Mode parse_mode(const std::string& s) {
    if (s == "full_efe") return Mode::full_efe;
    if (s == "kl_control") return Mode::kl_control;
    if (s == "bayes_design") return Mode::bayes_design;
    if (s == "utility_only") return Mode::utility_only;
    throw ConfigError("unknown mode '" + s + "'");
}

DecisionRule parse_decision(const std::string& s) {
    if (s == "argmax") return DecisionRule::argmax;
    if (s == "sample") return DecisionRule::sample;
    throw ConfigError("unknown decision rule '" + s + "'");
}

PriorVariant parse_prior_variant(const std::string& s) {
    if (s == "unnormalized") return PriorVariant::unnormalized;
    if (s == "normalized") return PriorVariant::normalized;
    throw ConfigError("unknown prior variant '" + s + "'");
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json j = read_json_file(path);
    if (!j.is_object() || j.empty())
        throw ConfigError("'" + path + "': empty or non-object config");

    ExperimentConfig cfg;
    try {
        if (j.contains("model")) {
            const json& mj = j["model"];
            if (mj.is_string()) {
                cfg.builtin = mj.get<std::string>();
                if (cfg.builtin != "tmaze")
                    throw ConfigError("unknown builtin model '" + cfg.builtin + "'");
            } else if (mj.contains("file")) {
                cfg.model_file = mj["file"].get<std::string>();
            } else if (mj.contains("gridworld")) {
                const json& g = mj["gridworld"];
                GridworldParams gp;
                gp.width = g.value("width", 2);
                gp.height = g.value("height", 2);
                gp.slip = g.value("slip", 0.0);
                gp.goal = g.value("goal", gp.width * gp.height - 1);
                gp.horizon = g.value("horizon", 2);
                gp.start = g.value("start", 0);
                cfg.builtin = "gridworld";
                cfg.gridworld = gp;
            } else {
                throw ConfigError("model must be a builtin name, {file}, or {gridworld}");
            }
        }
        if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
        if (j.contains("prior_variant"))
            cfg.prior_variant = parse_prior_variant(j["prior_variant"].get<std::string>());
        if (j.contains("decision"))
            cfg.decision = parse_decision(j["decision"].get<std::string>());
        if (j.contains("seeds"))
            for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
        cfg.steps = j.value("steps", 0);
        cfg.out_dir = j.value("out_dir", std::string("."));
        if (j.contains("verification")) {
            cfg.theorem_cases = j["verification"].value("theorem_cases", cfg.theorem_cases);
            cfg.oracle_cases = j["verification"].value("oracle_cases", cfg.oracle_cases);
            cfg.corrupt_priors = j["verification"].value("corrupt_priors", false);
        }
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    return cfg;
}

std::string episode_to_json(const EpisodeLog& log) {
    json steps = json::array();
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
        const EpisodeStep& s = log.steps[i];
        json breakdown = json::array();
        for (std::size_t u = 0; u < s.breakdown.total.size(); ++u)
            breakdown.push_back(json{{"risk", s.breakdown.risk[u]},
                                     {"ambiguity", s.breakdown.ambiguity[u]},
                                     {"novelty", s.breakdown.novelty[u]},
                                     {"total", s.breakdown.total[u]}});
        steps.push_back(json{{"step", i},
                             {"action", s.action},
                             {"observation", s.observation},
                             {"chosen_policy", s.chosen_policy},
                             {"q_star", s.q_star.probs()},
                             {"efe", breakdown},
                             {"f_value", s.f_value},
                             {"state_belief", s.state_belief.probs()},
                             {"theta_belief", s.theta_belief.probs()},
                             {"true_state_after", s.true_state_after}});
    }
    json j{{"schema_version", kSchemaVersion},
           {"seed", log.seed},
           {"mode", to_string(log.mode)},
           {"steps", steps},
           {"final_true_state", log.final_true_state},
           {"reward_proxy", log.reward_proxy}};
    return j.dump(2) + "\n";
}

std::string episode_to_csv(const EpisodeLog& log) {
    std::ostringstream out;
    out << "schema_version," << kSchemaVersion << "\n";
    out << "step,action,observation,chosen_policy,q_star_max,f_value,"
           "theta_entropy,true_state_after\n";
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
        const EpisodeStep& s = log.steps[i];
        double qmax = 0.0;
        for (std::size_t u = 0; u < s.q_star.size(); ++u)
            qmax = std::max(qmax, s.q_star.prob(u));
        double th_entropy = 0.0;
        for (std::size_t t = 0; t < s.theta_belief.size(); ++t)
            th_entropy -= xlogx_from_log(s.theta_belief.log_prob(t));
        out << i << ',' << s.action << ',' << s.observation << ',' << s.chosen_policy
            << ',' << fmt(qmax) << ',' << fmt(s.f_value) << ',' << fmt(th_entropy) << ','
            << s.true_state_after << "\n";
    }
    return out.str();
}

std::string theorem_report_to_json(const TheoremReport& rep) {
    json j{{"schema_version", kSchemaVersion},
           {"f_direct", rep.f_direct},
           {"expected_g", rep.expected_g},
           {"complexity_total", rep.complexity_total},
           {"residual", rep.residual},
           {"lemma_residuals", rep.lemma_residuals},
           {"max_lemma_residual", rep.max_lemma_residual},
           {"f_normalized", rep.f_normalized},
           {"constant_shift", rep.constant_shift},
           {"recorded_constants", rep.recorded_constants}};
    return j.dump(2) + "\n";
}

namespace {

std::string actions_string(const Policy& p) {
    std::string s;
    for (std::size_t k = 0; k < p.actions.size(); ++k) {
        if (k) s += '-';
        s += std::to_string(p.actions[k]);
    }
    return s;
}

} // namespace

std::string planner_result_to_json(const PlannerResult& res,
                                   const std::vector<Policy>& policies) {
    json rows = json::array();
    for (std::size_t u = 0; u < policies.size(); ++u)
        rows.push_back(json{{"policy_id", u},
                            {"actions", actions_string(policies[u])},
                            {"risk", res.breakdown.risk[u]},
                            {"ambiguity", res.breakdown.ambiguity[u]},
                            {"novelty", res.breakdown.novelty[u]},
                            {"G", res.g_mode[u]},
                            {"P", res.prior_cost[u]},
                            {"C", res.complexity[u]},
                            {"q_star", res.q_star.prob(u)}});
    json j{{"schema_version", kSchemaVersion},
           {"mode", to_string(res.mode)},
           {"f_value", res.f_value},
           {"policies", rows}};
    return j.dump(2) + "\n";
}

std::string epistemic_priors_to_json(const EpistemicPriors& priors) {
    json j{{"schema_version", kSchemaVersion},
           {"normalized", priors.normalized},
           {"log_tilde_u", priors.log_tilde_u},
           {"log_tilde_x", priors.log_tilde_x},
           {"log_tilde_yx", priors.log_tilde_yx},
           {"log_z_u", priors.log_z_u},
           {"log_z_x", priors.log_z_x},
           {"log_z_yx", priors.log_z_yx}};
    return j.dump(2) + "\n";
}

std::string plan_to_csv(const PlannerResult& res, const std::vector<Policy>& policies) {
    std::vector<std::size_t> order(policies.size());
    for (std::size_t u = 0; u < order.size(); ++u) order[u] = u;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return res.g_mode[a] < res.g_mode[b];
    });
    std::ostringstream out;
    out << "schema_version," << kSchemaVersion << "\n";
    out << "policy_id,actions,risk,ambiguity,novelty,G,P,C,q_star\n";
    for (std::size_t u : order) {
        out << u << ',' << actions_string(policies[u]) << ','
            << fmt(res.breakdown.risk[u]) << ',' << fmt(res.breakdown.ambiguity[u]) << ','
            << fmt(res.breakdown.novelty[u]) << ',' << fmt(res.g_mode[u]) << ','
            << fmt(res.prior_cost[u]) << ',' << fmt(res.complexity[u]) << ','
            << fmt(res.q_star.prob(u)) << "\n";
    }
    return out.str();
}

std::string verify_rows_to_csv(const std::vector<VerifyRow>& rows) {
    std::ostringstream out;
    out << "schema_version," << kSchemaVersion << "\n";
    out << "check_name,seed,residual,tolerance,pass\n";
    for (const VerifyRow& r : rows)
        out << r.check_name << ',' << r.seed << ',' << fmt(r.residual) << ','
            << fmt(r.tolerance) << ',' << (r.pass ? "true" : "false") << "\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

} // namespace efeplan
