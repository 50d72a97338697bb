#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hoal/agents.hpp"
#include "hoal/cli_io.hpp"
#include "hoal/experiments.hpp"
#include "hoal/parallel.hpp"

namespace fs = std::filesystem;
using namespace hoal;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool exact_likelihood = false;
    int threads = 1;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
    cmd->add_option("--config", opts.config_path, "Config file (flat key = value)");
    cmd->add_option("--seed", opts.seed, "Master seed, overrides run.seed");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_flag("--exact-likelihood", opts.exact_likelihood, "Use the normalized softmax likelihood");
    cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
}

ScenarioConfig resolve(const CommonOptions &opts, Scenario scenario) {
    ScenarioConfig cfg = default_config(scenario);
    if (!opts.config_path.empty()) cfg = parse_config(opts.config_path, cfg);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.exact_likelihood) cfg.exact_likelihood = true;
    cfg.validate();
    set_num_threads(opts.threads);
    return cfg;
}

std::string out_path(const CommonOptions &opts, const std::string &name) {
    return (fs::path(opts.out_dir) / name).string();
}

void prepare_out(const CommonOptions &opts) { fs::create_directories(opts.out_dir); }

std::vector<double> best_over_answers(const std::vector<double> &utilities) {
    std::vector<double> out(utilities.size() / 2);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(utilities[2 * c], utilities[2 * c + 1]);
    return out;
}

std::string describe(const LabeledExample &ex) {
    return "x1=" + format_real(ex.query.x1) + " x2=" + format_real(ex.query.x2) + " y=" + std::to_string(as_int(ex.answer));
}

int cmd_reproduce(const std::string &figure, const CommonOptions &opts) {
    const Scenario scenario = figure == "fig2"   ? Scenario::unimodal
                              : figure == "fig3" ? Scenario::bimodal
                                                 : Scenario::belief_correction;
    const ScenarioConfig cfg = resolve(opts, scenario);
    const RunReport report = run_scenario(scenario, cfg);
    prepare_out(opts);

    const QueryGrid qg = cfg.query_grid();
    const ThetaGrid tg = cfg.theta_grid();
    std::map<std::string, std::string> outputs;
    auto emit = [&](const std::string &name) {
        const std::string p = out_path(opts, name);
        outputs[name] = p;
        return p;
    };
    write_queries_csv(report.queries, emit("queries.csv"));
    write_eig_csv(report.eig_true, qg, emit("eig_true.csv"));
    write_eig_csv(report.eig_estimated, qg, emit("eig_estimated.csv"));
    write_belief_csv(discretize_belief(cfg.prior, tg), emit("belief_true.csv"));
    write_belief_csv(tg, report.belief_estimated, emit("belief_estimated.csv"));
    render_heatmap_svg(report.eig_true, qg, report.queries, emit("eig_true.svg"), {"EIG, true belief"});
    render_heatmap_svg(report.eig_estimated, qg, report.queries, emit("eig_estimated.svg"),
                       {"EIG, estimated belief"});
    if (report.uniform_teacher) {
        const auto &u = *report.uniform_teacher;
        const auto &a = *report.adaptive_teacher;
        write_teaching_csv(u.utilities, qg, emit("teaching_uniform.csv"));
        write_teaching_csv(a.utilities, qg, emit("teaching_adaptive.csv"));
        render_heatmap_svg(best_over_answers(u.utilities), qg, {u.best.query}, emit("teaching_uniform.svg"),
                           {"Teaching utility, uniform belief"});
        render_heatmap_svg(best_over_answers(a.utilities), qg, {a.best.query}, emit("teaching_adaptive.svg"),
                           {"Teaching utility, inferred belief"});
    }
    write_text_file(emit("report.json"), report_to_json(report, false));
    write_manifest(cfg, outputs, report.timings, out_path(opts, "manifest.json"));

    const BeliefParams &e = report.estimated;
    std::printf("%s seed=%llu correlation=%s estimate=(%s, %s, %s, %s, %s)\n", figure.c_str(),
                static_cast<unsigned long long>(cfg.seed), format_real(report.correlation).c_str(),
                format_real(e.mu1).c_str(), format_real(e.sigma1).c_str(), format_real(e.mu2).c_str(),
                format_real(e.sigma2).c_str(), format_real(e.p_z).c_str());
    if (report.uniform_teacher) {
        std::printf("uniform teacher: %s\nadaptive teacher: %s\n", describe(report.uniform_teacher->best).c_str(),
                    describe(report.adaptive_teacher->best).c_str());
    }
    return 0;
}

int cmd_eig_map(const CommonOptions &opts) {
    const ScenarioConfig cfg = resolve(opts, Scenario::unimodal);
    prepare_out(opts);
    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const std::vector<double> map = table.eig_map(discretize_belief(cfg.prior, table.theta_grid()));
    std::map<std::string, std::string> outputs;
    outputs["eig.csv"] = out_path(opts, "eig.csv");
    outputs["eig.svg"] = out_path(opts, "eig.svg");
    write_eig_csv(map, table.query_grid(), outputs["eig.csv"]);
    render_heatmap_svg(map, table.query_grid(), {}, outputs["eig.svg"], {"EIG"});
    write_manifest(cfg, outputs, {}, out_path(opts, "manifest.json"));
    const std::size_t best = argmax_index(map);
    const Query q = table.query_grid().candidate(best);
    std::printf("max eig=%s at x1=%s x2=%s\n", format_real(map[best]).c_str(), format_real(q.x1).c_str(),
                format_real(q.x2).c_str());
    return 0;
}

int cmd_estimate(const CommonOptions &opts, const std::string &queries_path) {
    const ScenarioConfig cfg = resolve(opts, Scenario::unimodal);
    const QueryDataset data{read_queries_csv(queries_path)};
    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const MleResult r = mle_belief(data, cfg.mle, table, cfg.exact_likelihood, Rationality(cfg.beta_a));
    const GridBelief estimated = discretize_belief(r.params, table.theta_grid());
    prepare_out(opts);
    std::map<std::string, std::string> outputs;
    outputs["belief_estimated.csv"] = out_path(opts, "belief_estimated.csv");
    outputs["eig_estimated.csv"] = out_path(opts, "eig_estimated.csv");
    write_belief_csv(estimated, outputs["belief_estimated.csv"]);
    write_eig_csv(table.eig_map(estimated), table.query_grid(), outputs["eig_estimated.csv"]);
    write_manifest(cfg, outputs, {}, out_path(opts, "manifest.json"));
    std::printf("mu1=%s sigma1=%s mu2=%s sigma2=%s p_z=%s\n", format_real(r.params.mu1).c_str(),
                format_real(r.params.sigma1).c_str(), format_real(r.params.mu2).c_str(),
                format_real(r.params.sigma2).c_str(), format_real(r.params.p_z).c_str());
    return 0;
}

int cmd_teach(const std::string &mode, const CommonOptions &opts) {
    const ScenarioConfig cfg = resolve(opts, Scenario::belief_correction);
    const RunReport report = run_belief_correction(cfg);
    const TeachingSummary &t = mode == "uniform" ? *report.uniform_teacher : *report.adaptive_teacher;
    prepare_out(opts);
    const QueryGrid qg = cfg.query_grid();
    std::map<std::string, std::string> outputs;
    outputs["teaching.csv"] = out_path(opts, "teaching_" + mode + ".csv");
    outputs["teaching.svg"] = out_path(opts, "teaching_" + mode + ".svg");
    write_teaching_csv(t.utilities, qg, outputs["teaching.csv"]);
    render_heatmap_svg(best_over_answers(t.utilities), qg, {t.best.query}, outputs["teaching.svg"],
                       {"Teaching utility (" + mode + ")"});
    write_manifest(cfg, outputs, report.timings, out_path(opts, "manifest.json"));
    std::printf("%s teacher: %s utility=%s learner_mass_after=%s\n", mode.c_str(), describe(t.best).c_str(),
                format_real(t.best_utility).c_str(), format_real(t.learner_mass_after).c_str());
    return 0;
}

int cmd_loop(const CommonOptions &opts, std::optional<int> learner, std::optional<int> teacher,
             std::optional<int> rounds) {
    ScenarioConfig cfg = resolve(opts, Scenario::unimodal);
    if (learner) cfg.learner_level = *learner;
    if (teacher) cfg.teacher_level = *teacher;
    if (rounds) cfg.rounds = *rounds;
    const InteractionTrace trace = run_interaction_loop(cfg, cfg.learner_level, cfg.teacher_level, cfg.rounds);
    prepare_out(opts);
    std::map<std::string, std::string> outputs;
    outputs["trace.csv"] = out_path(opts, "trace.csv");
    write_trace_csv(trace, outputs["trace.csv"]);
    write_manifest(cfg, outputs, {}, out_path(opts, "manifest.json"));
    std::printf("initial_entropy=%s final_entropy=%s final_mass_at_truth=%s\n",
                format_real(trace.initial_entropy).c_str(), format_real(trace.rows.back().entropy).c_str(),
                format_real(trace.rows.back().mass_at_truth).c_str());
    return 0;
}

Query parse_query_arg(const std::string &s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--query", "expected x1,x2");
    try {
        std::size_t used1 = 0, used2 = 0;
        const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
        const double x1 = std::stod(a, &used1);
        const double x2 = std::stod(b, &used2);
        if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument(s);
        return {x1, x2};
    } catch (const std::logic_error &) {
        throw CLI::ValidationError("--query", "expected x1,x2 as two reals");
    }
}

int cmd_intent_bf(const CommonOptions &opts, const Query &q) {
    const ScenarioConfig cfg = resolve(opts, Scenario::unimodal);
    const EigTable table(cfg.theta_grid(), cfg.query_grid(), cfg.reward);
    const double bf = bayes_factor(q, intent_fixture(), Rationality(cfg.beta_a), cfg.lambda, table);
    std::printf("bayes_factor=%s (%s)\n", format_real(bf).c_str(), bf > 1.0 ? "literal" : "rhetorical");
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Higher-order active learning with preference queries"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonOptions opts;
    std::string figure, teach_mode, queries_path, query_arg;
    std::optional<int> learner, teacher, rounds;

    auto *reproduce = app.add_subcommand("reproduce", "Reproduce one of the three experiments");
    reproduce->add_option("figure", figure, "fig2 | fig3 | fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    add_common(reproduce, opts);

    auto *eig = app.add_subcommand("eig-map", "EIG over the query grid for the configured prior");
    add_common(eig, opts);

    auto *estimate = app.add_subcommand("estimate-belief", "Maximum-likelihood belief behind a query set");
    estimate->add_option("--queries", queries_path, "CSV with header x1,x2")->required();
    add_common(estimate, opts);

    auto *teach = app.add_subcommand("teach", "Strategic teaching example for the false-belief scenario");
    teach->add_option("mode", teach_mode, "uniform | adaptive")->required()->check(CLI::IsMember({"uniform", "adaptive"}));
    add_common(teach, opts);

    auto *loop = app.add_subcommand("loop", "Learner/teacher interaction loop");
    loop->add_option("--learner", learner, "Learner level (2)");
    loop->add_option("--teacher", teacher, "Teacher level (1 or 3)");
    loop->add_option("--rounds", rounds, "Number of rounds");
    add_common(loop, opts);

    auto *intent = app.add_subcommand("intent-bf", "Literal-vs-rhetorical Bayes factor of a query");
    intent->add_option("--query", query_arg, "x1,x2 on the query grid")->required();
    add_common(intent, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*reproduce) return cmd_reproduce(figure, opts);
        if (*eig) return cmd_eig_map(opts);
        if (*estimate) return cmd_estimate(opts, queries_path);
        if (*teach) return cmd_teach(teach_mode, opts);
        if (*loop) return cmd_loop(opts, learner, teacher, rounds);
        if (*intent) return cmd_intent_bf(opts, parse_query_arg(query_arg));
    } catch (const CLI::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
