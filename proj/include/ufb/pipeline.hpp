#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ufb/scenario.hpp"
#include "ufb/selfsimilar_series.hpp"
#include "ufb/weiss_monitor.hpp"

namespace ufb {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kOutDirEnv = "UFB_OUT_DIR";

/// Schema violation in a run configuration. `field` is the dotted path of
/// the offending key; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string field, int line)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

enum class Stage { solve, boundary, hodograph, weiss, blowup, series };
std::string to_string(Stage s);
std::optional<Stage> parse_stage(const std::string& s);

struct RunConfig {
    ScenarioLabel scenario = ScenarioLabel::time_only;
    std::vector<Stage> stages;  // empty: the scenario's default stages
    int nx = 0;                 // 0: scenario default
    int nt = 0;
    double eps_max = 0.1;
    double eps_min = 0.1 * 0.000244140625;  // 0.1 * 2^-12
    double stop_tol = 0.0;                  // 0: 1e-4 for collapsing_interval, 1e-6 otherwise
    int max_picard = 5000;
    double alpha = 0.5;
    double gamma = 0.25;
    double M = 20.0;
    WeissVariant weiss_variant = WeissVariant::proof_2x;
    std::vector<double> weiss_radii;      // empty: derived from the time range
    std::optional<std::array<double, 2>> weiss_origin;  // (x, t)
    std::vector<int> blowup_resolutions{201, 401, 801};
    std::vector<double> series_c{0.1, 1.0, 10.0};
    int series_N = 200;
    double series_x_max = 20.0;
    SlopeConvention series_slope = SlopeConvention::literal;
    std::string input_field;  // custom scenario: binary field to analyse
    std::string out_dir = "ufb_out";
};

/// Parses the JSON configuration. Throws ConfigError for malformed text,
/// unknown keys, wrong types, out-of-range values or a missing/unsupported version.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Stages run when none are requested.
std::vector<Stage> default_stages(ScenarioLabel s);

struct RunOutcome {
    int exit_code = 0;  // 0 success, 3 numeric failure
    std::filesystem::path manifest;
    std::string manifest_text;
};

/// Runs the stages in dependency order and writes manifest.json (byte-stable
/// for identical configs), timings.json and the artifacts into cfg.out_dir.
/// A numeric failure marks its stage failed and the dependent stages skipped.
RunOutcome run_pipeline(const RunConfig& cfg);

/// Resolves the output directory: environment variable, then the given value.
std::string resolve_out_dir(const std::string& requested);

std::string version_string();

}  // namespace ufb
