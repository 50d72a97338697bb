#include "hoal/cli_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hoal/checksum.hpp"

namespace hoal {

namespace {

using Setter = std::function<void(ScenarioConfig &, const std::string &)>;
using Getter = std::function<std::string(const ScenarioConfig &)>;

struct KeySpec {
    std::string key;
    Setter set;
    Getter get;
};

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string &v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw std::invalid_argument("expected a finite real number, got '" + v + "'");
    }
    return out;
}

template <typename Int>
Int parse_int(const std::string &v) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected an integer, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string &v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("expected true or false, got '" + v + "'");
}

void require_positive(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("must be > 0");
}

void require_nonnegative(double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("must be >= 0");
}

void require_unit(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("must lie in [0, 1]");
}

KeySpec real_key(std::string key, double ScenarioConfig::*member, void (*check)(double) = nullptr) {
    return {std::move(key),
            [member, check](ScenarioConfig &c, const std::string &v) {
                const double x = parse_real(v);
                if (check) check(x);
                c.*member = x;
            },
            [member](const ScenarioConfig &c) { return format_real(c.*member); }};
}

KeySpec int_key(std::string key, int ScenarioConfig::*member, int min_value) {
    return {std::move(key),
            [member, min_value](ScenarioConfig &c, const std::string &v) {
                const int x = parse_int<int>(v);
                if (x < min_value) throw std::invalid_argument("must be >= " + std::to_string(min_value));
                c.*member = x;
            },
            [member](const ScenarioConfig &c) { return std::to_string(c.*member); }};
}

KeySpec prior_key(std::string key, double BeliefParams::*member, void (*check)(double) = nullptr) {
    return {std::move(key),
            [member, check](ScenarioConfig &c, const std::string &v) {
                const double x = parse_real(v);
                if (check) check(x);
                c.prior.*member = x;
            },
            [member](const ScenarioConfig &c) { return format_real(c.prior.*member); }};
}

KeySpec mle_real_key(std::string key, double MleSearchConfig::*member, void (*check)(double) = nullptr) {
    return {std::move(key),
            [member, check](ScenarioConfig &c, const std::string &v) {
                const double x = parse_real(v);
                if (check) check(x);
                c.mle.*member = x;
            },
            [member](const ScenarioConfig &c) { return format_real(c.mle.*member); }};
}

KeySpec mle_int_key(std::string key, int MleSearchConfig::*member, int min_value) {
    return {std::move(key),
            [member, min_value](ScenarioConfig &c, const std::string &v) {
                const int x = parse_int<int>(v);
                if (x < min_value) throw std::invalid_argument("must be >= " + std::to_string(min_value));
                c.mle.*member = x;
            },
            [member](const ScenarioConfig &c) { return std::to_string(c.mle.*member); }};
}

const std::vector<KeySpec> &key_specs() {
    static const std::vector<KeySpec> specs = [] {
        using C = ScenarioConfig;
        using M = MleSearchConfig;
        std::vector<KeySpec> v;
        v.push_back(prior_key("prior.mu1", &BeliefParams::mu1));
        v.push_back(prior_key("prior.sigma1", &BeliefParams::sigma1, require_positive));
        v.push_back(prior_key("prior.mu2", &BeliefParams::mu2));
        v.push_back(prior_key("prior.sigma2", &BeliefParams::sigma2, require_positive));
        v.push_back(prior_key("prior.p_z", &BeliefParams::p_z, require_unit));
        v.push_back(real_key("agent.beta_a", &C::beta_a, require_nonnegative));
        v.push_back(real_key("agent.beta_h", &C::beta_h, require_nonnegative));
        v.push_back(real_key("agent.lambda", &C::lambda, require_unit));
        v.push_back({"agent.reward", [](C &c, const std::string &s) { c.reward = reward_form_from_string(s); },
                     [](const C &c) { return to_string(c.reward); }});
        v.push_back(real_key("grid.theta_lo", &C::theta_lo));
        v.push_back(real_key("grid.theta_hi", &C::theta_hi));
        v.push_back(int_key("grid.theta_n", &C::theta_n, 3));
        v.push_back(real_key("grid.query_lo", &C::query_lo));
        v.push_back(real_key("grid.query_hi", &C::query_hi));
        v.push_back(int_key("grid.query_n", &C::query_n, 2));
        v.push_back({"run.seed", [](C &c, const std::string &s) { c.seed = parse_int<std::uint64_t>(s); },
                     [](const C &c) { return std::to_string(c.seed); }});
        v.push_back(int_key("run.n_queries", &C::n_queries, 1));
        v.push_back(real_key("run.theta_true", &C::theta_true));
        v.push_back({"run.exact_likelihood", [](C &c, const std::string &s) { c.exact_likelihood = parse_bool(s); },
                     [](const C &c) { return std::string(c.exact_likelihood ? "true" : "false"); }});
        v.push_back({"run.selection",
                     [](C &c, const std::string &s) {
                         if (s == "sample") {
                             c.selection = SelectionMode::sample;
                         } else if (s == "argmax") {
                             c.selection = SelectionMode::argmax;
                         } else {
                             throw std::invalid_argument("expected sample or argmax, got '" + s + "'");
                         }
                     },
                     [](const C &c) { return std::string(c.selection == SelectionMode::sample ? "sample" : "argmax"); }});
        v.push_back(int_key("run.rounds", &C::rounds, 1));
        v.push_back(int_key("run.learner_level", &C::learner_level, 1));
        v.push_back(int_key("run.teacher_level", &C::teacher_level, 1));
        v.push_back(mle_real_key("mle.mu1_lo", &M::mu1_lo));
        v.push_back(mle_real_key("mle.mu1_hi", &M::mu1_hi));
        v.push_back(mle_int_key("mle.mu1_n", &M::mu1_n, 1));
        v.push_back(mle_real_key("mle.mu2_lo", &M::mu2_lo));
        v.push_back(mle_real_key("mle.mu2_hi", &M::mu2_hi));
        v.push_back(mle_int_key("mle.mu2_n", &M::mu2_n, 1));
        v.push_back(mle_real_key("mle.sigma_lo", &M::sigma_lo, require_positive));
        v.push_back(mle_real_key("mle.sigma_hi", &M::sigma_hi, require_positive));
        v.push_back(mle_int_key("mle.sigma_n", &M::sigma_n, 1));
        v.push_back(mle_real_key("mle.p_z_lo", &M::p_z_lo, require_unit));
        v.push_back(mle_real_key("mle.p_z_hi", &M::p_z_hi, require_unit));
        v.push_back(mle_int_key("mle.p_z_n", &M::p_z_n, 1));
        v.push_back(mle_int_key("mle.refine_iters", &M::n_refine_iters, 0));
        v.push_back(mle_real_key("mle.refine_shrink", &M::refine_shrink, [](double x) {
            if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("must lie in (0, 1)");
        }));
        return v;
    }();
    return specs;
}

std::ofstream open_for_write(const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

void finish(std::ofstream &out, const std::string &path) {
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string &path, const std::string &expected_header) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || trim(line) != expected_header) {
        throw std::runtime_error(path + ": expected header '" + expected_header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        rows.push_back(std::move(fields));
    }
    return rows;
}

nlohmann::ordered_json config_json(const ScenarioConfig &cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto &spec : key_specs()) j[spec.key] = spec.get(cfg);
    return j;
}

nlohmann::ordered_json query_json(const Query &q) { return {q.x1, q.x2}; }

nlohmann::ordered_json teaching_json(const TeachingSummary &t) {
    nlohmann::ordered_json j;
    j["best"] = {{"x1", t.best.query.x1}, {"x2", t.best.query.x2}, {"y", as_int(t.best.answer)}};
    j["best_utility"] = t.best_utility;
    j["learner_mass_after"] = t.learner_mass_after;
    return j;
}

}  // namespace

ConfigParseError::ConfigParseError(const std::string &source, int line, const std::string &key,
                                   const std::string &message)
    : ConfigError(source + ":" + std::to_string(line) + ": " + (key.empty() ? "" : key + ": ") + message),
      line_(line),
      key_(key) {}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto &s : key_specs()) out.push_back(s.key);
    return out;
}

ScenarioConfig parse_config_text(const std::string &text, const ScenarioConfig &base, const std::string &source) {
    ScenarioConfig cfg = base;
    std::istringstream in(text);
    std::string raw;
    std::set<std::string> seen;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigParseError(source, line_no, "", "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(source, line_no, "", "missing key");
        const auto &specs = key_specs();
        const auto it = std::find_if(specs.begin(), specs.end(), [&](const KeySpec &s) { return s.key == key; });
        if (it == specs.end()) throw ConfigParseError(source, line_no, key, "unknown key");
        if (!seen.insert(key).second) throw ConfigParseError(source, line_no, key, "duplicate key");
        if (value.empty()) throw ConfigParseError(source, line_no, key, "missing value");
        try {
            it->set(cfg, value);
        } catch (const std::exception &e) {
            throw ConfigParseError(source, line_no, key, e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config(const std::string &path, const ScenarioConfig &base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    return parse_config_text(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()), base, path);
}

std::string serialize_config(const ScenarioConfig &cfg) {
    std::string out;
    for (const auto &spec : key_specs()) out += spec.key + " = " + spec.get(cfg) + "\n";
    return out;
}

std::string format_real(double v) {
    if (v == 0.0) return "0";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

void write_text_file(const std::string &path, const std::string &contents) {
    auto out = open_for_write(path);
    out << contents;
    finish(out, path);
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_eig_csv(const std::vector<double> &map, const QueryGrid &qg, const std::string &path) {
    if (map.size() != qg.size()) throw InvalidInput("EIG map does not match the query grid");
    std::string s = "x1,x2,eig\n";
    for (std::size_t c = 0; c < map.size(); ++c) {
        const Query q = qg.candidate(c);
        s += format_real(q.x1) + "," + format_real(q.x2) + "," + format_real(map[c]) + "\n";
    }
    write_text_file(path, s);
}

void write_belief_csv(const ThetaGrid &grid, const std::vector<double> &mass, const std::string &path) {
    if (static_cast<int>(mass.size()) != grid.size()) throw InvalidInput("belief does not match the theta grid");
    std::string s = "theta,mass\n";
    for (int k = 0; k < grid.size(); ++k) s += format_real(grid.point(k)) + "," + format_real(mass[k]) + "\n";
    write_text_file(path, s);
}

void write_belief_csv(const GridBelief &b, const std::string &path) { write_belief_csv(b.grid(), b.mass(), path); }

GridBelief read_belief_csv(const std::string &path) {
    const auto rows = read_csv_rows(path, "theta,mass");
    if (rows.size() < 3) throw std::runtime_error(path + ": a belief needs at least 3 rows");
    std::vector<double> theta, mass;
    for (const auto &r : rows) {
        if (r.size() != 2) throw std::runtime_error(path + ": expected 2 columns");
        theta.push_back(parse_real(r[0]));
        mass.push_back(parse_real(r[1]));
    }
    return GridBelief(ThetaGrid(theta.front(), theta.back(), static_cast<int>(theta.size())), std::move(mass));
}

void write_queries_csv(const std::vector<Query> &queries, const std::string &path) {
    std::string s = "x1,x2\n";
    for (const auto &q : queries) s += format_real(q.x1) + "," + format_real(q.x2) + "\n";
    write_text_file(path, s);
}

std::vector<Query> read_queries_csv(const std::string &path) {
    std::vector<Query> out;
    for (const auto &r : read_csv_rows(path, "x1,x2")) {
        if (r.size() != 2) throw std::runtime_error(path + ": expected 2 columns");
        out.push_back({parse_real(r[0]), parse_real(r[1])});
    }
    return out;
}

void write_trace_csv(const InteractionTrace &trace, const std::string &path) {
    std::string s = "round,x1,x2,y,entropy\n";
    for (const auto &r : trace.rows) {
        s += std::to_string(r.round) + "," + format_real(r.query.x1) + "," + format_real(r.query.x2) + "," +
             std::to_string(as_int(r.answer)) + "," + format_real(r.entropy) + "\n";
    }
    write_text_file(path, s);
}

void write_teaching_csv(const std::vector<double> &utilities, const QueryGrid &qg, const std::string &path) {
    if (utilities.size() != 2 * qg.size()) throw InvalidInput("teaching utilities do not match the query grid");
    std::string s = "x1,x2,y,utility\n";
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        const LabeledExample ex = teaching_candidate(qg, i);
        s += format_real(ex.query.x1) + "," + format_real(ex.query.x2) + "," + std::to_string(as_int(ex.answer)) +
             "," + format_real(utilities[i]) + "\n";
    }
    write_text_file(path, s);
}

std::string report_to_json(const RunReport &report, bool include_timings) {
    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["config"] = config_json(report.config);
    auto qs = nlohmann::ordered_json::array();
    for (const auto &q : report.queries) qs.push_back(query_json(q));
    j["queries"] = qs;
    const BeliefParams &e = report.estimated;
    j["estimated"] = {{"mu1", e.mu1}, {"sigma1", e.sigma1}, {"mu2", e.mu2}, {"sigma2", e.sigma2}, {"p_z", e.p_z}};
    j["mle_objective"] = report.mle_objective;
    j["correlation"] = report.correlation;
    if (report.uniform_teacher) j["uniform_teacher"] = teaching_json(*report.uniform_teacher);
    if (report.adaptive_teacher) j["adaptive_teacher"] = teaching_json(*report.adaptive_teacher);
    if (include_timings) {
        auto t = nlohmann::ordered_json::object();
        for (const auto &s : report.timings) t[s.step] = s.seconds;
        j["timings"] = t;
    }
    return j.dump(2) + "\n";
}

std::string manifest_json(const ScenarioConfig &cfg, const std::map<std::string, std::string> &outputs,
                          const std::vector<StepTiming> &timings, bool include_timings) {
    nlohmann::ordered_json j;
    j["tool"] = kToolVersion;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    auto files = nlohmann::ordered_json::object();
    for (const auto &[name, path] : outputs) files[name] = {{"sha256", sha256_file_hex(path)}};
    j["outputs"] = files;
    if (include_timings) {
        auto t = nlohmann::ordered_json::object();
        for (const auto &s : timings) t[s.step] = s.seconds;
        j["timings"] = t;
    }
    return j.dump(2) + "\n";
}

void write_manifest(const ScenarioConfig &cfg, const std::map<std::string, std::string> &outputs,
                    const std::vector<StepTiming> &timings, const std::string &path) {
    write_text_file(path, manifest_json(cfg, outputs, timings, true));
}

std::string ramp_color(double t) {
    // viridis at 0, .25, .5, .75, 1
    static constexpr std::array<std::array<double, 3>, 5> stops = {{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    std::array<char, 8> buf{};
    std::array<int, 3> rgb{};
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf.data();
}

std::string heatmap_svg(const std::vector<double> &map, const QueryGrid &qg, const std::vector<Query> &markers,
                        const HeatmapStyle &style) {
    if (map.size() != qg.size()) throw InvalidInput("heatmap values do not match the query grid");
    const int n = qg.n_per_axis();
    const double cell = style.cell_px;
    const double margin = 30.0;
    const double side = n * cell;
    const auto [mn_it, mx_it] = std::minmax_element(map.begin(), map.end());
    const double mn = *mn_it;
    const double span = *mx_it - mn;

    auto num = [](double v) {
        std::array<char, 32> buf{};
        std::snprintf(buf.data(), buf.size(), "%.2f", v);
        return std::string(buf.data());
    };
    const double step = n > 1 ? (qg.hi() - qg.lo()) / (n - 1) : 1.0;
    auto px_x = [&](double x1) { return margin + ((x1 - qg.lo()) / step + 0.5) * cell; };
    auto px_y = [&](double x2) { return margin + side - ((x2 - qg.lo()) / step + 0.5) * cell; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(side + 2 * margin) + "\" height=\"" +
         num(side + 2 * margin) + "\">\n";
    if (!style.title.empty()) s += "<title>" + style.title + "</title>\n";
    s += "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t c = 0; c < map.size(); ++c) {
        const int i1 = static_cast<int>(c / n);
        const int i2 = static_cast<int>(c % n);
        const double t = span > 0.0 ? (map[c] - mn) / span : 0.0;
        s += "<rect x=\"" + num(margin + i1 * cell) + "\" y=\"" + num(margin + side - (i2 + 1) * cell) +
             "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + ramp_color(t) + "\"/>\n";
    }
    s += "</g>\n";
    const double arm = cell * 0.6;
    for (const auto &q : markers) {
        const double x = px_x(q.x1);
        const double y = px_y(q.x2);
        s += "<path d=\"M" + num(x - arm) + " " + num(y - arm) + " L" + num(x + arm) + " " + num(y + arm) + " M" +
             num(x - arm) + " " + num(y + arm) + " L" + num(x + arm) + " " + num(y - arm) +
             "\" stroke=\"#ff3030\" stroke-width=\"2\" class=\"marker\"/>\n";
    }
    s += "<text x=\"" + num(margin + side / 2) + "\" y=\"" + num(side + 2 * margin - 8) +
         "\" text-anchor=\"middle\" font-size=\"12\">x1</text>\n";
    s += "<text x=\"10\" y=\"" + num(margin + side / 2) + "\" font-size=\"12\">x2</text>\n";
    s += "</svg>\n";
    return s;
}

void render_heatmap_svg(const std::vector<double> &map, const QueryGrid &qg, const std::vector<Query> &markers,
                        const std::string &path, const HeatmapStyle &style) {
    write_text_file(path, heatmap_svg(map, qg, markers, style));
}

}  // namespace hoal
