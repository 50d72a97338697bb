#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoal/agents.hpp"
#include "hoal/bayes.hpp"
#include "hoal/preference.hpp"

namespace hoal {

class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

enum class Scenario { unimodal, bimodal, belief_correction };

struct ScenarioConfig {
    BeliefParams prior{-3.0, 1.0, 3.0, 1.0, 0.9};
    double theta_true = 2.0;
    int n_queries = 5;
    double beta_a = 50.0;
    double beta_h = 50.0;
    double lambda = 0.5;
    RewardForm reward = RewardForm::absolute_distance;
    double theta_lo = -6.0;
    double theta_hi = 6.0;
    int theta_n = 241;
    double query_lo = -6.0;
    double query_hi = 6.0;
    int query_n = 49;
    std::uint64_t seed = 1;
    MleSearchConfig mle;
    bool exact_likelihood = true;
    SelectionMode selection = SelectionMode::sample;
    int rounds = 20;
    int learner_level = 2;
    int teacher_level = 1;

    // Throws ConfigError naming the offending field.
    void validate() const;
    ThetaGrid theta_grid() const { return ThetaGrid(theta_lo, theta_hi, theta_n); }
    QueryGrid query_grid() const { return QueryGrid(query_lo, query_hi, query_n); }

    bool operator==(const ScenarioConfig &) const = default;
};

// Scenario-specific defaults; unimodal is also the generic default.
ScenarioConfig default_config(Scenario scenario);

struct StepTiming {
    std::string step;
    double seconds;
};

struct TeachingSummary {
    std::vector<double> utilities;  // per teaching candidate, index = 2 * query candidate + y
    LabeledExample best;
    double best_utility;
    // Mass the learner's actual belief puts on theta_true after the best example.
    double learner_mass_after;
};

struct RunReport {
    std::string scenario;
    ScenarioConfig config;
    std::vector<Query> queries;
    BeliefParams estimated;
    double mle_objective = 0.0;
    std::vector<double> belief_estimated;  // grid mass of the estimated belief
    std::vector<double> eig_true;
    std::vector<double> eig_estimated;
    double correlation = 0.0;
    std::optional<TeachingSummary> uniform_teacher;
    std::optional<TeachingSummary> adaptive_teacher;
    std::vector<StepTiming> timings;
};

RunReport run_unimodal_identifiability(const ScenarioConfig &cfg);
RunReport run_bimodal_identifiability(const ScenarioConfig &cfg);
RunReport run_belief_correction(const ScenarioConfig &cfg);
RunReport run_scenario(Scenario scenario, const ScenarioConfig &cfg);

struct TraceRow {
    int round;
    Query query;
    Answer answer;
    double entropy;        // learner posterior entropy after the answer
    double mass_at_truth;  // learner posterior mass at theta_true after the answer
};

struct InteractionTrace {
    double initial_entropy;
    double initial_mass_at_truth;
    std::vector<TraceRow> rows;
};

// Learner level 2 queries with its level-2 policy; teacher level 1 answers literally,
// level 3 answers strategically while tracking the learner's posterior exactly.
InteractionTrace run_interaction_loop(const ScenarioConfig &cfg, int learner_level, int teacher_level, int rounds);

// SHA-256 over (master seed LE, label, 0x00, index LE); first 8 digest bytes, big-endian.
std::uint64_t derive_subseed(std::uint64_t master_seed, const std::string &label, std::uint64_t index);

// Pearson correlation over non-diagonal candidates; 0 when either map is constant.
double eig_map_correlation(const std::vector<double> &a, const std::vector<double> &b, const QueryGrid &qg);

}  // namespace hoal

namespace hoal {

// Two-particle second-order belief used by the intent-bf command: the unimodal
// prior (-3, 1, 3, 1, 0.9) and its group-flipped twin (p_z = 0.1), equal weights.
BeliefEnsemble intent_fixture();

}  // namespace hoal
