#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ufb/pipeline.hpp"

using namespace ufb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ufb_test_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

ConfigError config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError for: " << text);
    return ConfigError("", "", 0);
}

}  // namespace

TEST_CASE("config: full round of valid keys") {
    const auto c = parse_config(R"({
  "version": 1,
  "scenario": "collapsing_interval",
  "stages": ["solve", "blowup"],
  "grid": {"nx": 101, "nt": 201},
  "schedule": {"eps_max": 0.05, "eps_min": 0.001, "stop_tol": 1e-5, "max_picard": 100},
  "rescale": {"alpha": 0.4, "gamma": 0.3, "M": 5},
  "weiss": {"variant": "paper-def", "radii": [0.2, 0.1], "origin": [0, 0.5]},
  "blowup": {"resolutions": [101, 201]},
  "series": {"c": [2], "N": 50, "x_max": 10, "slope": "matched"},
  "out_dir": "somewhere"
})");
    CHECK(c.scenario == ScenarioLabel::collapsing_interval);
    REQUIRE(c.stages.size() == 2);
    CHECK(c.stages[1] == Stage::blowup);
    CHECK(c.nx == 101);
    CHECK(c.nt == 201);
    CHECK(c.eps_min == 0.001);
    CHECK(c.max_picard == 100);
    CHECK(c.gamma == 0.3);
    CHECK(c.weiss_variant == WeissVariant::paper_def);
    REQUIRE(c.weiss_origin);
    CHECK((*c.weiss_origin)[1] == 0.5);
    CHECK(c.blowup_resolutions.size() == 2);
    CHECK(c.series_slope == SlopeConvention::matched);
    CHECK(c.out_dir == "somewhere");
}

TEST_CASE("config: unknown key reports field path and line") {
    const auto e = config_error("{\n  \"version\": 1,\n  \"scenario\": \"time_only\",\n  \"grid\": {\"nx\": 41, \"bogus\": 3}\n}\n");
    CHECK(e.field() == "grid.bogus");
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
}

TEST_CASE("config: schema violations") {
    CHECK(config_error(R"({"scenario": "time_only"})").field() == "version");
    CHECK(config_error(R"({"version": 2, "scenario": "time_only"})").field() == "version");
    CHECK(config_error(R"({"version": 1})").field() == "scenario");
    CHECK(config_error(R"({"version": 1, "scenario": "nope"})").field() == "scenario");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "grid": {"nx": "41"}})").field() == "grid.nx");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "grid": {"nx": 2}})").field() == "grid.nx");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "stages": ["solve", "fly"]})").field() == "stages");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "rescale": {"alpha": 0.7, "gamma": 0.5}})").field() ==
          "rescale.gamma");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "schedule": {"eps_max": 0.01, "eps_min": 0.1}})")
              .field() == "schedule.eps_min");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "weiss": {"origin": [1]}})").field() ==
          "weiss.origin");
    CHECK(config_error(R"({"version": 1, "scenario": "time_only", "blowup": {"resolutions": [201]}})").field() ==
          "blowup.resolutions");
    CHECK(config_error(R"({"version": 1, "scenario": "custom"})").field() == "input_field");
}

TEST_CASE("config: malformed JSON reports a line") {
    const auto e = config_error("{\n  \"version\": 1,\n  \"scenario\": \"time_only\",,\n}\n");
    CHECK(e.line() == 3);
    CHECK_THROWS_AS(load_config(scratch("missing") / "none.json"), ConfigError);
}

TEST_CASE("stage names round-trip") {
    for (auto s : {Stage::solve, Stage::boundary, Stage::hodograph, Stage::weiss, Stage::blowup, Stage::series})
        CHECK(parse_stage(to_string(s)) == s);
    CHECK_FALSE(parse_stage("Solve"));
}

TEST_CASE("time_only run is deterministic and writes its artifacts") {
    RunConfig c;
    c.scenario = ScenarioLabel::time_only;
    c.nx = 41;
    c.nt = 41;
    c.out_dir = scratch("det_a").string();
    const auto a = run_pipeline(c);
    c.out_dir = scratch("det_b").string();
    const auto b = run_pipeline(c);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.manifest_text == b.manifest_text);
    CHECK(slurp(a.manifest) == slurp(b.manifest));
    CHECK(slurp(a.manifest) == a.manifest_text);
    for (const char* f : {"u.ufbf", "boundary.csv", "weiss.csv", "timings.json"})
        CHECK(fs::exists(fs::path(c.out_dir) / f));
    CHECK(a.manifest_text.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(a.manifest_text.find("\"failed\"") == std::string::npos);
    // timings never leak into the manifest
    CHECK(a.manifest_text.find("seconds") == std::string::npos);
}

TEST_CASE("numeric failure exits 3 and still writes the manifest") {
    RunConfig c;
    c.scenario = ScenarioLabel::collapsing_interval;
    c.nx = 101;
    c.max_picard = 3;
    c.stages = {Stage::solve, Stage::boundary};
    c.out_dir = scratch("fail").string();
    const auto r = run_pipeline(c);
    CHECK(r.exit_code == 3);
    REQUIRE(fs::exists(r.manifest));
    const auto m = slurp(r.manifest);
    CHECK(m.find("\"failed\"") != std::string::npos);
    CHECK(m.find("\"skipped\"") != std::string::npos);
}

TEST_CASE("output directory environment override") {
    ::setenv(kOutDirEnv, "from_env", 1);
    CHECK(resolve_out_dir("from_flag") == "from_env");
    ::unsetenv(kOutDirEnv);
    CHECK(resolve_out_dir("from_flag") == "from_flag");
}
