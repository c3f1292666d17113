#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ufb/acceptance.hpp"
#include "ufb/field_io.hpp"
#include "ufb/pipeline.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct RunFlags {
    std::string config, scenario, stages, out_dir, weiss_variant;
    int nx = 0, nt = 0;
    double eps_min = 0, alpha = 0, gamma = 0;
    bool acceptance = false;
};

// Flags override the config file; both go through the same validation.
ufb::RunConfig build_config(const RunFlags& f, CLI::App& run) {
    ufb::RunConfig c;
    if (!f.config.empty()) c = ufb::load_config(f.config);
    if (!f.scenario.empty()) {
        const auto l = ufb::parse_scenario_label(f.scenario);
        if (!l) throw ufb::ConfigError("--scenario: unknown scenario '" + f.scenario + "'", "scenario", 0);
        c.scenario = *l;
    } else if (f.config.empty()) {
        throw ufb::ConfigError("run: give --scenario or --config", "scenario", 0);
    }
    if (!f.stages.empty()) {
        c.stages.clear();
        for (const auto& s : split(f.stages, ',')) {
            const auto st = ufb::parse_stage(s);
            if (!st) throw ufb::ConfigError("--stages: unknown stage '" + s + "'", "stages", 0);
            c.stages.push_back(*st);
        }
    }
    if (run.count("--nx")) c.nx = f.nx;
    if (run.count("--nt")) c.nt = f.nt;
    if (run.count("--eps-min")) {
        if (!(f.eps_min > 0.0) || f.eps_min > c.eps_max)
            throw ufb::ConfigError("--eps-min: must lie in (0, eps_max]", "schedule.eps_min", 0);
        c.eps_min = f.eps_min;
    }
    if (run.count("--alpha")) c.alpha = f.alpha;
    if (run.count("--gamma")) c.gamma = f.gamma;
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ufb::ConfigError("--alpha: must lie in (0, 1)", "rescale.alpha", 0);
    if (!(c.gamma > 0.0 && c.gamma < 1.0 - c.alpha))
        throw ufb::ConfigError("--gamma: must lie in (0, 1 - alpha)", "rescale.gamma", 0);
    if (!f.weiss_variant.empty()) {
        const auto v = ufb::parse_weiss_variant(f.weiss_variant);
        if (!v) throw ufb::ConfigError("--weiss-variant: expected paper-def or proof-2x", "weiss.variant", 0);
        c.weiss_variant = *v;
    }
    if (!f.out_dir.empty()) c.out_dir = f.out_dir;
    c.out_dir = ufb::resolve_out_dir(c.out_dir);
    if (c.scenario == ufb::ScenarioLabel::custom && c.input_field.empty())
        throw ufb::ConfigError("custom scenario needs input_field in the config", "input_field", 0);
    return c;
}

int run_acceptance(const std::vector<int>& only, const std::string& variant) {
    ufb::AcceptanceOptions opt;
    opt.only = only;
    if (!variant.empty()) {
        const auto v = ufb::parse_weiss_variant(variant);
        if (!v) {
            std::cerr << "error: --weiss-variant: expected paper-def or proof-2x\n";
            return kExitConfig;
        }
        opt.variant = *v;
    }
    bool all = true;
    for (const auto& r : ufb::run_acceptance(opt)) {
        std::cout << ufb::format_line(r) << std::endl;
        all = all && r.pass;
    }
    return all ? EXIT_SUCCESS : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for u_t - Laplace u = chi_{u>0}"};
    app.set_version_flag("--version", ufb::version_string());
    app.require_subcommand(1);

    RunFlags rf;
    auto* run = app.add_subcommand("run", "run a scenario pipeline");
    run->add_option("--config", rf.config, "JSON run configuration");
    run->add_option("--scenario", rf.scenario, "scenario label (see list-scenarios)");
    run->add_option("--stages", rf.stages, "comma list of solve,boundary,hodograph,weiss,blowup,series");
    run->add_option("--out-dir", rf.out_dir, std::string("output directory (") + ufb::kOutDirEnv + " overrides)");
    run->add_option("--nx", rf.nx, "spatial nodes per axis")->check(CLI::Range(3, 100000));
    run->add_option("--nt", rf.nt, "time levels")->check(CLI::Range(3, 10000000));
    run->add_option("--eps-min", rf.eps_min, "smallest regularization parameter");
    run->add_option("--alpha", rf.alpha, "Holder exponent");
    run->add_option("--gamma", rf.gamma, "scaling exponent");
    run->add_option("--weiss-variant", rf.weiss_variant, "paper-def or proof-2x");
    run->add_flag("--acceptance", rf.acceptance, "run the acceptance suite instead of a scenario");

    std::string input, format, output;
    auto* exp = app.add_subcommand("export", "convert a binary field to CSV or binary");
    exp->add_option("--input", input, "binary field")->required();
    exp->add_option("--format", format, "csv or binary")->required()->check(CLI::IsMember({"csv", "binary"}));
    exp->add_option("--output", output, "destination file")->required();

    std::string only, acc_variant;
    auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria");
    acc->add_option("--only", only, "comma list of criterion ids");
    acc->add_option("--weiss-variant", acc_variant, "paper-def or proof-2x");

    app.add_subcommand("list-scenarios", "print scenario labels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (app.got_subcommand("list-scenarios")) {
        for (auto l : ufb::all_scenario_labels()) std::cout << ufb::to_string(l) << "\t" << ufb::describe(l) << "\n";
        return EXIT_SUCCESS;
    }

    if (app.got_subcommand("acceptance")) {
        std::vector<int> ids;
        for (const auto& s : split(only, ',')) {
            try {
                ids.push_back(std::stoi(s));
            } catch (const std::exception&) {
                std::cerr << "error: --only: '" << s << "' is not a criterion id\n";
                return kExitConfig;
            }
        }
        return run_acceptance(ids, acc_variant);
    }

    if (app.got_subcommand("export")) {
        try {
            const auto u = ufb::read_field(std::filesystem::path(input));
            if (format == "csv")
                ufb::write_field_csv(std::filesystem::path(output), u);
            else
                ufb::write_field(std::filesystem::path(output), u);
        } catch (const std::exception& e) {
            std::cerr << "error: export " << input << " -> " << output << ": " << e.what() << "\n";
            return kExitFail;
        }
        return EXIT_SUCCESS;
    }

    if (rf.acceptance) return run_acceptance({}, rf.weiss_variant);
    ufb::RunConfig cfg;
    try {
        cfg = build_config(rf, *run);
    } catch (const ufb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto out = ufb::run_pipeline(cfg);
        std::cout << "manifest: " << out.manifest.string() << "\n";
        if (out.exit_code != 0) std::cerr << "numeric failure; see the manifest for the failed stage\n";
        return out.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
}
