#pragma once

#include <map>
#include <string>
#include <vector>

#include "hoal/bayes.hpp"
#include "hoal/experiments.hpp"

namespace hoal {

// Config files are flat "key = value" lines; '#' starts a comment.
class ConfigParseError : public ConfigError {
   public:
    ConfigParseError(const std::string &source, int line, const std::string &key, const std::string &message);

    int line() const { return line_; }
    const std::string &key() const { return key_; }

   private:
    int line_;
    std::string key_;
};

ScenarioConfig parse_config_text(const std::string &text, const ScenarioConfig &base,
                                 const std::string &source = "<config>");
ScenarioConfig parse_config(const std::string &path, const ScenarioConfig &base = default_config(Scenario::unimodal));
std::string serialize_config(const ScenarioConfig &cfg);
std::vector<std::string> config_keys();

// 17 significant digits, "-0" printed as "0".
std::string format_real(double v);

void write_text_file(const std::string &path, const std::string &contents);
std::string read_text_file(const std::string &path);

void write_eig_csv(const std::vector<double> &map, const QueryGrid &qg, const std::string &path);
void write_belief_csv(const GridBelief &b, const std::string &path);
void write_belief_csv(const ThetaGrid &grid, const std::vector<double> &mass, const std::string &path);
GridBelief read_belief_csv(const std::string &path);
void write_queries_csv(const std::vector<Query> &queries, const std::string &path);
std::vector<Query> read_queries_csv(const std::string &path);
void write_trace_csv(const InteractionTrace &trace, const std::string &path);
// Columns x1,x2,y,utility in teaching-candidate order.
void write_teaching_csv(const std::vector<double> &utilities, const QueryGrid &qg, const std::string &path);

// Run report without timings unless requested; key order is fixed.
std::string report_to_json(const RunReport &report, bool include_timings);

inline constexpr const char *kToolVersion = "hoal 1.0.0";

// Manifest with tool version, resolved config, seed, SHA-256 of each output file and
// (optionally) wall-clock timings. outputs maps manifest name -> file path.
std::string manifest_json(const ScenarioConfig &cfg, const std::map<std::string, std::string> &outputs,
                          const std::vector<StepTiming> &timings, bool include_timings);
void write_manifest(const ScenarioConfig &cfg, const std::map<std::string, std::string> &outputs,
                    const std::vector<StepTiming> &timings, const std::string &path);

struct HeatmapStyle {
    std::string title;
    double cell_px = 10.0;
};

// One rect per candidate (x1 left to right, x2 bottom to top), fill from a 5-stop
// viridis ramp over [min, max]; a constant map uses the first stop. Markers are crosses.
std::string heatmap_svg(const std::vector<double> &map, const QueryGrid &qg, const std::vector<Query> &markers,
                        const HeatmapStyle &style = {});
void render_heatmap_svg(const std::vector<double> &map, const QueryGrid &qg, const std::vector<Query> &markers,
                        const std::string &path, const HeatmapStyle &style = {});
std::string ramp_color(double t);

}  // namespace hoal
