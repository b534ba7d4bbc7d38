#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efeplan/envs.hpp"
#include "efeplan/epistemic.hpp"
#include "efeplan/model.hpp"
#include "efeplan/oracle.hpp"
#include "efeplan/planner.hpp"

namespace efeplan {

inline constexpr int kSchemaVersion = 1;

/// A model file bundles the generative model with its preference priors.
struct ModelFile {
    GenerativeModel model;
    std::optional<PreferencePrior> preference;
    std::optional<ObsPreferencePrior> obs_preference;
};

/// Loads a model document. Probability rows are linear-domain in the file
/// and validated row by row; failures name the offending row.
ModelFile load_model_file(const std::string& path);
ModelFile parse_model_json(const std::string& text, const std::string& origin);

/// Writes the model (and preference, when given) back out, linear domain.
std::string model_to_json(const GenerativeModel& model,
                          const PreferencePrior* pref = nullptr,
                          const ObsPreferencePrior* obs_pref = nullptr);
void save_model_file(const std::string& path, const GenerativeModel& model,
                     const PreferencePrior* pref = nullptr,
                     const ObsPreferencePrior* obs_pref = nullptr);

/// Experiment configuration consumed by the command-line runner.
struct GridworldParams {
    int width = 2, height = 2;
    double slip = 0.0;
    int goal = 3, horizon = 2, start = 0;
};

struct ExperimentConfig {
    std::string builtin;                       // "tmaze", "gridworld", or empty
    std::string model_file;                    // path when builtin is empty
    std::optional<GridworldParams> gridworld;  // set when builtin == "gridworld"
    Mode mode = Mode::full_efe;
    PriorVariant prior_variant = PriorVariant::unnormalized;
    DecisionRule decision = DecisionRule::argmax;
    std::vector<std::uint64_t> seeds;
    int steps = 0;
    std::string out_dir = ".";
    int theorem_cases = 200;
    int oracle_cases = 60;
    bool corrupt_priors = false;  // negative-control hook
};

ExperimentConfig load_experiment_config(const std::string& path);

Mode parse_mode(const std::string& s);
DecisionRule parse_decision(const std::string& s);
PriorVariant parse_prior_variant(const std::string& s);

/// Output serialization. CSV files begin with a schema_version line.
std::string episode_to_json(const EpisodeLog& log);
std::string episode_to_csv(const EpisodeLog& log);
std::string theorem_report_to_json(const TheoremReport& rep);
std::string planner_result_to_json(const PlannerResult& res,
                                   const std::vector<Policy>& policies);
std::string epistemic_priors_to_json(const EpistemicPriors& priors);

/// Per-policy plan table, rows sorted by ascending masked total.
std::string plan_to_csv(const PlannerResult& res, const std::vector<Policy>& policies);

struct VerifyRow {
    std::string check_name;
    std::uint64_t seed = 0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

std::string verify_rows_to_csv(const std::vector<VerifyRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

} // namespace efeplan
