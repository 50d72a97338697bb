#include "hoal/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "hoal/checksum.hpp"

namespace hoal {

namespace {

class StepTimer {
   public:
    explicit StepTimer(std::vector<StepTiming> &sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}

    void mark(const std::string &step) {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back({step, std::chrono::duration<double>(now - start_).count()});
        start_ = now;
    }

   private:
    std::vector<StepTiming> &sink_;
    std::chrono::steady_clock::time_point start_;
};

void require(bool ok, const std::string &message) {
    if (!ok) throw ConfigError(message);
}

void append_le64(std::string &buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::vector<Query> sample_queries(const ScenarioConfig &cfg, const GridBelief &belief, const EigTable &table) {
    const QueryPolicy policy = l2_query_policy(belief, table, Rationality(cfg.beta_a));
    Rng rng(derive_subseed(cfg.seed, "queries", 0));
    std::vector<Query> out;
    for (int i = 0; i < cfg.n_queries; ++i) out.push_back(l2_select_query(policy, cfg.selection, rng));
    return out;
}

RunReport run_identifiability(const std::string &name, const ScenarioConfig &cfg) {
    cfg.validate();
    RunReport report;
    report.scenario = name;
    report.config = cfg;
    StepTimer timer(report.timings);

    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const GridBelief truth = discretize_belief(cfg.prior, table.theta_grid());
    timer.mark("setup");

    report.eig_true = table.eig_map(truth);
    report.queries = sample_queries(cfg, truth, table);
    timer.mark("sample_queries");

    const MleResult mle =
        mle_belief(QueryDataset{report.queries}, cfg.mle, table, cfg.exact_likelihood, Rationality(cfg.beta_a));
    report.estimated = mle.params;
    report.mle_objective = mle.objective;
    timer.mark("mle");

    const GridBelief estimated = discretize_belief(mle.params, table.theta_grid());
    report.belief_estimated = estimated.mass();
    report.eig_estimated = table.eig_map(estimated);
    report.correlation = eig_map_correlation(report.eig_true, report.eig_estimated, table.query_grid());
    timer.mark("eig_maps");
    return report;
}

TeachingSummary summarize_teaching(const TeachingPolicy &policy, const ScenarioConfig &cfg, const QueryGrid &qg,
                                   const GridBelief &learner) {
    TeachingSummary s;
    const std::size_t best = argmax_index(policy.utilities);
    s.best = teaching_candidate(qg, best);
    s.best_utility = policy.utilities[best];
    s.learner_mass_after = l3_teaching_utility(s.best, cfg.theta_true, learner, cfg.reward);
    s.utilities = policy.utilities;
    return s;
}

}  // namespace

void ScenarioConfig::validate() const {
    try {
        prior.validate();
    } catch (const InvalidInput &e) {
        throw ConfigError(std::string("prior: ") + e.what());
    }
    require(std::isfinite(theta_true), "run.theta_true must be finite");
    require(theta_true >= theta_lo && theta_true <= theta_hi, "run.theta_true must lie inside the theta grid");
    require(n_queries >= 1, "run.n_queries must be >= 1");
    require(std::isfinite(beta_a) && beta_a >= 0.0, "agent.beta_a must be finite and >= 0");
    require(std::isfinite(beta_h) && beta_h >= 0.0, "agent.beta_h must be finite and >= 0");
    require(lambda >= 0.0 && lambda <= 1.0, "agent.lambda must lie in [0, 1]");
    require(theta_lo < theta_hi, "grid.theta_lo must be < grid.theta_hi");
    require(theta_n >= 3, "grid.theta_n must be >= 3");
    require(query_lo < query_hi, "grid.query_lo must be < grid.query_hi");
    require(query_n >= 2, "grid.query_n must be >= 2");
    require(rounds >= 1, "run.rounds must be >= 1");
    try {
        mle.validate();
    } catch (const InvalidInput &e) {
        throw ConfigError(std::string("mle: ") + e.what());
    }
}

ScenarioConfig default_config(Scenario scenario) {
    ScenarioConfig cfg;
    if (scenario == Scenario::bimodal) {
        cfg.prior = {-3.0, 0.5, 3.0, 0.5, 0.6};
        cfg.n_queries = 20;
    }
    return cfg;
}

RunReport run_unimodal_identifiability(const ScenarioConfig &cfg) { return run_identifiability("unimodal", cfg); }

RunReport run_bimodal_identifiability(const ScenarioConfig &cfg) { return run_identifiability("bimodal", cfg); }

RunReport run_belief_correction(const ScenarioConfig &cfg) {
    cfg.validate();
    RunReport report;
    report.scenario = "belief_correction";
    report.config = cfg;
    StepTimer timer(report.timings);

    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const GridBelief learner = discretize_belief(cfg.prior, table.theta_grid());
    timer.mark("setup");

    report.eig_true = table.eig_map(learner);
    report.queries = sample_queries(cfg, learner, table);
    timer.mark("sample_queries");

    const MleResult mle =
        mle_belief(QueryDataset{report.queries}, cfg.mle, table, cfg.exact_likelihood, Rationality(cfg.beta_a));
    report.estimated = mle.params;
    report.mle_objective = mle.objective;
    const GridBelief inferred = discretize_belief(mle.params, table.theta_grid());
    report.belief_estimated = inferred.mass();
    report.eig_estimated = table.eig_map(inferred);
    report.correlation = eig_map_correlation(report.eig_true, report.eig_estimated, table.query_grid());
    timer.mark("mle");

    const Rationality beta_h(cfg.beta_h);
    const TeachingPolicy uniform =
        l3_teaching_policy(cfg.theta_true, {GridBelief::uniform(table.theta_grid())}, {1.0}, beta_h, table);
    report.uniform_teacher = summarize_teaching(uniform, cfg, table.query_grid(), learner);
    const TeachingPolicy adaptive = l3_teaching_policy(cfg.theta_true, {inferred}, {1.0}, beta_h, table);
    report.adaptive_teacher = summarize_teaching(adaptive, cfg, table.query_grid(), learner);
    timer.mark("teaching");
    return report;
}

RunReport run_scenario(Scenario scenario, const ScenarioConfig &cfg) {
    switch (scenario) {
        case Scenario::unimodal:
            return run_unimodal_identifiability(cfg);
        case Scenario::bimodal:
            return run_bimodal_identifiability(cfg);
        case Scenario::belief_correction:
            return run_belief_correction(cfg);
    }
    throw ConfigError("unknown scenario");
}

InteractionTrace run_interaction_loop(const ScenarioConfig &cfg, int learner_level, int teacher_level, int rounds) {
    cfg.validate();
    require(rounds >= 1, "interaction loop needs at least one round");
    require(learner_level == 2, "interaction loop supports learner level 2 only, got " + std::to_string(learner_level));
    require(teacher_level == 1 || teacher_level == 3,
            "interaction loop supports teacher levels 1 and 3, got " + std::to_string(teacher_level));

    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const int truth = table.theta_grid().nearest_index(cfg.theta_true);
    GridBelief belief = discretize_belief(cfg.prior, table.theta_grid());
    Rng query_rng(derive_subseed(cfg.seed, "loop.queries", 0));
    Rng answer_rng(derive_subseed(cfg.seed, "loop.answers", 0));

    InteractionTrace trace{entropy(belief), belief[truth], {}};
    for (int r = 0; r < rounds; ++r) {
        const QueryPolicy policy = l2_query_policy(belief, table, Rationality(cfg.beta_a));
        const Query q = l2_select_query(policy, cfg.selection, query_rng);
        Answer a;
        if (teacher_level == 1) {
            a = sample_answer(cfg.theta_true, q, cfg.reward, answer_rng);
        } else {
            const double p1 = l3_answer_policy(cfg.theta_true, q, {belief}, {1.0}, Rationality(cfg.beta_h), cfg.reward);
            a = answer_rng.uniform() < p1 ? Answer::prefer_second : Answer::prefer_first;
        }
        belief = posterior_update(belief, q, a, cfg.reward);
        trace.rows.push_back({r + 1, q, a, entropy(belief), belief[truth]});
    }
    return trace;
}

std::uint64_t derive_subseed(std::uint64_t master_seed, const std::string &label, std::uint64_t index) {
    if (label.empty()) throw InvalidInput("sub-seed label must be nonempty");
    std::string buf;
    append_le64(buf, master_seed);
    buf += label;
    buf.push_back('\0');
    append_le64(buf, index);
    const Sha256Digest d = sha256(buf);
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out = (out << 8) | d[i];
    return out;
}

double eig_map_correlation(const std::vector<double> &a, const std::vector<double> &b, const QueryGrid &qg) {
    if (a.size() != qg.size() || b.size() != qg.size()) throw InvalidInput("EIG maps do not match the query grid");
    double sa = 0.0, sb = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (qg.is_diagonal(c)) continue;
        sa += a[c];
        sb += b[c];
        ++n;
    }
    if (n < 2) return 0.0;
    const double ma = sa / n;
    const double mb = sb / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (qg.is_diagonal(c)) continue;
        cov += (a[c] - ma) * (b[c] - mb);
        va += (a[c] - ma) * (a[c] - ma);
        vb += (b[c] - mb) * (b[c] - mb);
    }
    if (!(va > 0.0) || !(vb > 0.0)) return 0.0;
    return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

}  // namespace hoal

namespace hoal {

BeliefEnsemble intent_fixture() {
    return BeliefEnsemble({{-3.0, 1.0, 3.0, 1.0, 0.9}, {-3.0, 1.0, 3.0, 1.0, 0.1}}, {0.5, 0.5});
}

}  // namespace hoal
