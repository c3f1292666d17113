#include "ufb/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ufb/blowup_analysis.hpp"
#include "ufb/field_io.hpp"
#include "ufb/free_boundary.hpp"
#include "ufb/hodograph.hpp"
#include "ufb/regularized_solver.hpp"

namespace ufb {

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- config

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        const auto dot = path.rfind('.');
        const int line = line_of_key(text_, dot == std::string::npos ? path : path.substr(dot + 1));
        std::ostringstream os;
        os << "config";
        if (line > 0) os << " line " << line;
        os << ", field '" << path << "': " << msg;
        throw ConfigError(os.str(), path, line);
    }

    void only_keys(const json& obj, const std::string& prefix, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(prefix, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
            if (!known) fail(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
        }
    }

    double number(const json& v, const std::string& path, double lo, double hi) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!(x >= lo && x <= hi)) {
            std::ostringstream os;
            os << "value " << x << " outside [" << lo << ", " << hi << "]";
            fail(path, os.str());
        }
        return x;
    }

    int integer(const json& v, const std::string& path, int lo, int hi) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        const auto x = v.get<long long>();
        if (x < lo || x > hi) fail(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                             std::to_string(hi) + "]");
        return static_cast<int>(x);
    }

    std::string string(const json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    const json& array(const json& v, const std::string& path) const {
        if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array");
        return v;
    }

private:
    const std::string& text_;
};

// ---------------------------------------------------------------- helpers

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(finite_or_null(x));
    return a;
}

RegularizationSchedule schedule_for(const RunConfig& c) {
    RegularizationSchedule s;
    for (double e = c.eps_max; e >= c.eps_min * (1.0 - 1e-12); e *= 0.5) s.eps_values.push_back(e);
    s.stop_tol = c.stop_tol > 0 ? c.stop_tol : (c.scenario == ScenarioLabel::collapsing_interval ? 1e-4 : 1e-6);
    s.max_picard = c.max_picard;
    s.validate();
    return s;
}

Grid grid_for(const RunConfig& c) {
    Grid g = default_grid(c.scenario, c.nx);
    if (c.nt > 0) g = Grid::make(g.dim, g.a, g.b, g.nx, g.t0, g.t1, c.nt);
    return g;
}

ScenarioSpec spec_for(const RunConfig& c, const Grid& g) {
    switch (c.scenario) {
        case ScenarioLabel::time_only: return make_time_only(g);
        case ScenarioLabel::local_cap: return make_local_cap(g);
        case ScenarioLabel::collapsing_interval: return make_collapsing_interval(g);
        default: break;
    }
    throw InvalidInput("scenario '" + std::string(to_string(c.scenario)) + "' is not solved by the regularized solver");
}

struct Artifacts {
    std::filesystem::path dir;
    json list = json::array();

    std::filesystem::path add(const std::string& name, const std::string& kind) {
        list.push_back({{"path", name}, {"kind", kind}});
        return dir / name;
    }
};

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return os;
}

// ---------------------------------------------------------------- stages

struct State {
    const RunConfig& cfg;
    Artifacts art;
    std::optional<SpaceTimeField> u;
    double c = 0.0;
    std::optional<FreeBoundaryGraph> fb;
    std::optional<CollapsePoint> collapse;
    bool numeric_failure = false;  // set by a stage that finished with a degraded result
};

json stage_solve(State& st) {
    const RunConfig& cfg = st.cfg;
    json out;
    if (cfg.scenario == ScenarioLabel::custom) {
        st.u = read_field(std::filesystem::path(cfg.input_field));
        out["source"] = "input_field";
        out["input_field"] = cfg.input_field;
    } else if (cfg.scenario == ScenarioLabel::elliptic_cross) {
        st.u = elliptic_cross_field(grid_for(cfg));
        out["source"] = "frozen";
        // |grad u| vanishes on the zero set at the origin: the cross point
        const Grid& g = st.u->grid();
        const std::size_t centre = g.flatten(g.nx / 2, g.nx / 2);
        out["value_at_origin"] = st.u->at(0, centre);
    } else {
        const Grid g = grid_for(cfg);
        const ScenarioSpec spec = spec_for(cfg, g);
        const RegularizationSchedule sched = schedule_for(cfg);
        st.c = spec.c;
        LeastSolutionResult res;
        try {
            res = least_solution(spec, sched);
        } catch (const LeastSolutionNotConverged& e) {
            res = e.partial();
            st.numeric_failure = true;
            out["status_detail"] = e.what();
        }
        st.u = res.u;
        out["source"] = "least_solution";
        out["eps_used"] = vec(res.eps_used);
        out["tail_sup_diffs"] = vec(res.tail_sup_diffs);
        out["tail_min_diffs"] = vec(res.tail_min_diffs);
        out["stop_tol"] = sched.stop_tol;
        out["converged"] = res.converged;
        long picard = 0;
        for (const auto& s : res.stats) picard += s.picard_iterations;
        out["picard_iterations"] = picard;
        const double band = std::max(1e-3, 2.0 * res.eps_used.back());
        const auto rs = residual_away_from_interface(res.u, band);
        out["residual"] = {{"band", band}, {"max_abs", rs.max_abs}, {"nodes", rs.nodes_checked},
                           {"pass", rs.max_abs < 1e-8}};
        if (spec.c > 0) {
            const auto tm = check_time_monotonicity(res.u, spec.c, 1e-3, true);
            out["time_monotonicity"] = {{"c", spec.c}, {"min_slope_positive_side", tm.min_slope}, {"pass", tm.pass}};
        }
    }
    const Grid& g = st.u->grid();
    out["grid"] = {{"dim", g.dim}, {"a", g.a}, {"b", g.b}, {"nx", g.nx}, {"t0", g.t0}, {"t1", g.t1}, {"nt", g.nt}};
    if (cfg.scenario != ScenarioLabel::custom) write_field(st.art.add("u.ufbf", "field"), *st.u);
    if (g.dim == 1) {
        try {
            st.collapse = locate_collapse(*st.u);
        } catch (const std::exception&) {
        }
    }
    return out;
}

json stage_boundary(State& st) {
    const SpaceTimeField& u = *st.u;
    json out;
    st.fb = extract_graph(u);
    const FreeBoundaryGraph& fb = *st.fb;
    out["valid_nodes"] = fb.valid_count();
    if (fb.empty()) {
        out["status"] = "empty graph";
        return out;
    }
    if (st.c > 0) {
        const auto lip = lipschitz_report(fb, u, st.c);
        out["lipschitz"] = {{"lip", lip.lip}, {"bound", lip.bound}, {"grad_sup", lip.grad_sup}, {"pass", lip.pass}};
    }
    const NormalField nf = normal_field(fb, u);
    if (nf.size() >= 2) {
        const auto nh = normal_holder_report(nf, st.cfg.alpha, st.c);
        out["normals"] = {{"samples", nf.size()},
                          {"holder_seminorm", nh.seminorm},
                          {"cone_excess", finite_or_null(nh.cone_excess)},
                          {"cone_pass", nh.cone_pass},
                          {"unit_defect", nh.unit_defect}};
    }
    if (st.collapse && u.grid().dim == 1) {
        const auto p = pinching_check(fb, u, st.collapse->node, st.cfg.alpha);
        out["pinching"] = {{"x0", st.collapse->x_star}, {"status", to_string(p.status)}, {"reason", p.reason},
                           {"exponent", p.exponent}, {"threshold", 1.0 + st.cfg.alpha - 0.15},
                           {"rhos", vec(p.rhos)}, {"sups", vec(p.sups)}};
    }
    std::ofstream os = open_out(st.art.add("boundary.csv", "csv"));
    write_boundary_csv(os, fb, nf);
    return out;
}

json stage_hodograph(State& st) {
    const SpaceTimeField& u = *st.u;
    const FreeBoundaryGraph& fb = *st.fb;
    const Grid& g = u.grid();
    json out;
    out["M"] = st.cfg.M;
    out["alpha"] = st.cfg.alpha;
    out["gamma"] = st.cfg.gamma;
    const auto env = ellipticity_envelope(st.cfg.M, g.dim);
    out["envelope"] = {env[0], env[1]};

    std::vector<std::size_t> eligible;
    for (std::size_t s = 0; s < fb.valid.size(); ++s) {
        if (!fb.valid[s]) continue;
        double x[2];
        g.coords(s, x);
        if (interpolated_grad_norm(u, x, fb.H[s]) > 1e-3) eligible.push_back(s);
    }
    json points = json::array();
    bool wrote_matrix = false;
    const std::size_t want = std::min<std::size_t>(4, eligible.size());
    for (std::size_t j = 0; j < want; ++j) {
        const std::size_t s = eligible[(2 * j + 1) * eligible.size() / (2 * want)];
        double x[2] = {0, 0};
        g.coords(s, x);
        json pt;
        pt["x"] = g.dim == 1 ? json(x[0]) : json({x[0], x[1]});
        pt["t"] = fb.H[s];
        try {
            const double gn = interpolated_grad_norm(u, x, fb.H[s]);
            const auto p = RescaleParams::make({x[0], x[1]}, fb.H[s], gn, st.cfg.M, st.cfg.alpha, st.cfg.gamma);
            const auto rf = rescale(u, p, g.dim == 1 ? 65 : 33);
            const auto rep = verify_rescale_properties(rf);
            const auto h = hodograph_transform(rf.ur, 0.1);
            const auto id = derivative_identities(rf.ur, h);
            const auto cm = coefficient_matrix(h);
            pt["grad_norm"] = gn;
            pt["r"] = p.r;
            pt["rescale"] = {{"tol", rep.tol}, {"q1", rep.q1}, {"q2", rep.q2}, {"q3", rep.q3}, {"q4", rep.q4},
                             {"q5", rep.q5}, {"q2_min", rep.q2_min}, {"q2_max", rep.q2_max},
                             {"q5_residual", rep.q5_residual}};
            pt["identities"] = {std::vector<double>(id.max_abs.begin(), id.max_abs.end())};
            pt["lambda_min"] = cm.lambda_min;
            pt["lambda_max"] = cm.lambda_max;
            pt["elliptic"] = cm.lambda_min > 0.0;
            if (!wrote_matrix) {
                std::ofstream os = open_out(st.art.add("coefficients.csv", "csv"));
                write_coefficient_csv(os, cm);
                wrote_matrix = true;
            }
        } catch (const DomainError& e) {
            pt["skipped"] = e.what();
        }
        points.push_back(pt);
    }
    out["points"] = points;
    if (eligible.empty()) out["status"] = "no boundary point with nonzero gradient";
    return out;
}

json stage_weiss(State& st) {
    const SpaceTimeField& u = *st.u;
    const Grid& g = u.grid();
    json out;
    SpaceTimePoint o;
    if (st.cfg.weiss_origin) {
        o.x = {(*st.cfg.weiss_origin)[0], 0.0};
        o.t = (*st.cfg.weiss_origin)[1];
    } else if (st.collapse) {
        o.x = {st.collapse->x_star, 0.0};
        o.t = st.collapse->t_star;
    } else {
        const std::size_t centre = g.dim == 1 ? g.flatten(g.nx / 2) : g.flatten(g.nx / 2, g.nx / 2);
        g.coords(centre, o.x.data());
        o.t = st.fb && st.fb->valid[centre] ? st.fb->H[centre] : g.t1;
    }
    out["origin"] = {{"x", g.dim == 1 ? json(o.x[0]) : json({o.x[0], o.x[1]})}, {"t", o.t}};
    out["variant"] = std::string(to_string(st.cfg.weiss_variant));

    std::vector<double> rs = st.cfg.weiss_radii;
    if (rs.empty()) {
        const double r_max = 0.95 * std::sqrt(std::max(0.0, o.t - g.t0) / 4.0) / 1.02;
        const double r_min = std::max(2.05 * std::sqrt(g.ht()), r_max / 8.0);
        if (!(r_max > r_min)) {
            out["status"] = "time range before the origin is too short";
            return out;
        }
        for (int k = 0; k < 6; ++k) rs.push_back(r_max * std::pow(r_min / r_max, k / 5.0));
    }
    const auto curve = weiss_curve(u, o, rs, {st.cfg.weiss_variant});
    out["radii"] = vec(curve.rs);
    out["psi"] = vec(curve.psi);
    out["dpsi_fd"] = vec(curve.dpsi_fd);
    out["dpsi_formula"] = vec(curve.dpsi_formula);
    out["quad_error"] = vec(curve.quad_error);
    out["kernel_mass_min"] = curve.kernel_mass_min;
    out["domain_truncated"] = curve.domain_truncated;
    out["min_slope"] = curve.min_slope;
    out["monotone"] = curve.monotone(1e-3);
    try {
        out["homogeneity_defect"] = homogeneity_defect(u, o, 0.5);
    } catch (const std::exception& e) {
        out["homogeneity_defect"] = nullptr;
    }
    std::ofstream os = open_out(st.art.add("weiss.csv", "csv"));
    write_weiss_csv(os, curve);
    return out;
}

json stage_blowup(State& st) {
    json out;
    if (st.cfg.scenario != ScenarioLabel::collapsing_interval) {
        out["status"] = "skipped: the collapse analysis runs on collapsing_interval";
        return out;
    }
    RunConfig c = st.cfg;
    std::vector<SpaceTimeField> us;
    std::vector<int> res = c.blowup_resolutions;
    std::sort(res.begin(), res.end());
    for (int n : res) {
        c.nx = n;
        c.nt = 0;
        const Grid g = grid_for(c);
        try {
            us.push_back(least_solution(spec_for(c, g), schedule_for(c)).u);
        } catch (const LeastSolutionNotConverged& e) {
            us.push_back(e.partial().u);
        }
    }
    const auto rep = analyze_collapse(us, dyadic_rhos(0.4, 0.004), {st.cfg.alpha, 1.0, st.cfg.gamma, 1.0, 1e-3});
    json pts = json::array();
    for (std::size_t m = 0; m < rep.points.size(); ++m) {
        const auto& p = rep.points[m];
        pts.push_back({{"nx", res[m]}, {"x_star", p.x_star}, {"t_star", p.t_star}, {"t_lo", p.t_lo}, {"t_hi", p.t_hi}});
    }
    out["collapse"] = pts;
    out["brackets_consistent"] = rep.brackets_consistent;
    out["interval_violations"] = rep.interval.violations;
    out["ut_min_slope_positive_side"] = rep.ut_lower.min_slope;
    out["pinching"] = {{"status", to_string(rep.pinching.status)}, {"exponent", rep.pinching.exponent}};
    out["trend"] = {{"verdict", to_string(rep.trend.verdict)},
                    {"reason", rep.trend.reason},
                    {"finest_common_rho", rep.trend.finest_common_rho},
                    {"slopes", vec(rep.trend.slopes)}};
    if (rep.scaling_error.empty())
        out["scaling"] = {{"slope", rep.scaling.slope}, {"fitted_C", rep.scaling.fitted_C}, {"pass", rep.scaling.pass}};
    else
        out["scaling"] = {{"error", rep.scaling_error}};
    {
        std::ofstream os = open_out(st.art.add("ut_table.csv", "csv"));
        write_ut_table_csv(os, rep.trend);
    }
    std::ofstream os = open_out(st.art.add("collapse_summary.csv", "csv"));
    write_collapse_summary(os, rep);
    return out;
}

json stage_series(State& st) {
    const RunConfig& cfg = st.cfg;
    json out = json::array();
    for (double c : cfg.series_c) {
        const ProfilePair pp = make_profile_pair(c, cfg.series_x_max, cfg.series_slope, cfg.series_N);
        const NegativityResult neg = negativity_finder(c, cfg.series_x_max, cfg.series_slope);
        std::ostringstream tag;
        tag << c;
        {
            std::ofstream os = open_out(st.art.add("series_coefficients_c" + tag.str() + ".csv", "csv"));
            write_coefficients_csv(os, pp.series);
        }
        {
            std::ofstream os = open_out(st.art.add("profile_c" + tag.str() + ".csv", "csv"));
            write_profile_csv(os, pp, 0.01);
        }
        out.push_back({{"c", c},
                       {"slope_convention", to_string(cfg.series_slope)},
                       {"a2", static_cast<double>(pp.series.coeffs[2])},
                       {"a3", static_cast<double>(pp.series.coeffs[3])},
                       {"a4", static_cast<double>(pp.series.coeffs[4])},
                       {"signs_negative_from_3", pp.series.signs_ok()},
                       {"recursion_residual", static_cast<double>(pp.series.recursion_residual)},
                       {"series_window_x_hi", pp.window.x_hi},
                       {"x_zero", neg.x_zero},
                       {"verdict", neg.verdict}});
    }
    return out;
}

std::vector<Stage> with_dependencies(std::vector<Stage> req) {
    std::set<Stage> s(req.begin(), req.end());
    if (s.count(Stage::hodograph)) s.insert(Stage::boundary);
    if (s.count(Stage::boundary) || s.count(Stage::weiss)) s.insert(Stage::solve);
    return {s.begin(), s.end()};  // enum order is dependency order
}

bool needs(Stage s, Stage dep) {
    switch (s) {
        case Stage::boundary:
        case Stage::weiss: return dep == Stage::solve;
        case Stage::hodograph: return dep == Stage::solve || dep == Stage::boundary;
        default: return false;
    }
}

json config_echo(const RunConfig& c, const std::vector<Stage>& stages) {
    json j;
    j["version"] = kConfigVersion;
    j["scenario"] = std::string(to_string(c.scenario));
    json st = json::array();
    for (Stage s : stages) st.push_back(to_string(s));
    j["stages"] = st;
    j["nx"] = c.nx;
    j["nt"] = c.nt;
    j["eps_max"] = c.eps_max;
    j["eps_min"] = c.eps_min;
    j["stop_tol"] = c.stop_tol;
    j["max_picard"] = c.max_picard;
    j["alpha"] = c.alpha;
    j["gamma"] = c.gamma;
    j["M"] = c.M;
    j["weiss_variant"] = std::string(to_string(c.weiss_variant));
    j["weiss_radii"] = vec(c.weiss_radii);
    j["blowup_resolutions"] = c.blowup_resolutions;
    j["series_c"] = vec(c.series_c);
    j["series_N"] = c.series_N;
    j["series_x_max"] = c.series_x_max;
    j["series_slope"] = to_string(c.series_slope);
    return j;
}

}  // namespace

std::string version_string() { return "ufb 0.1.0"; }

std::string to_string(Stage s) {
    switch (s) {
        case Stage::solve: return "solve";
        case Stage::boundary: return "boundary";
        case Stage::hodograph: return "hodograph";
        case Stage::weiss: return "weiss";
        case Stage::blowup: return "blowup";
        case Stage::series: return "series";
    }
    return "?";
}

std::optional<Stage> parse_stage(const std::string& s) {
    for (Stage st : {Stage::solve, Stage::boundary, Stage::hodograph, Stage::weiss, Stage::blowup, Stage::series})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

std::vector<Stage> default_stages(ScenarioLabel s) {
    switch (s) {
        case ScenarioLabel::time_only: return {Stage::solve, Stage::boundary, Stage::weiss};
        case ScenarioLabel::local_cap: return {Stage::solve, Stage::boundary};
        case ScenarioLabel::collapsing_interval:
            return {Stage::solve, Stage::boundary, Stage::hodograph, Stage::weiss, Stage::blowup};
        case ScenarioLabel::self_similar_1d: return {Stage::series};
        case ScenarioLabel::elliptic_cross: return {Stage::solve};
        case ScenarioLabel::custom: return {Stage::solve, Stage::boundary, Stage::weiss};
    }
    return {};
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError("config line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")", "", line);
    }
    Reader rd(text);
    rd.only_keys(j, "", {"version", "scenario", "stages", "grid", "schedule", "rescale", "weiss", "blowup", "series",
                         "input_field", "out_dir"});
    if (!j.contains("version")) rd.fail("version", "missing");
    if (rd.integer(j["version"], "version", 0, 1000) != kConfigVersion)
        rd.fail("version", "unsupported version (expected " + std::to_string(kConfigVersion) + ")");

    RunConfig c;
    if (!j.contains("scenario")) rd.fail("scenario", "missing");
    const auto label = parse_scenario_label(rd.string(j["scenario"], "scenario"));
    if (!label) rd.fail("scenario", "unknown scenario '" + j["scenario"].get<std::string>() + "'");
    c.scenario = *label;

    if (j.contains("stages"))
        for (const auto& s : rd.array(j["stages"], "stages")) {
            const auto st = parse_stage(rd.string(s, "stages"));
            if (!st) rd.fail("stages", "unknown stage '" + s.get<std::string>() + "'");
            c.stages.push_back(*st);
        }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        rd.only_keys(g, "grid", {"nx", "nt"});
        if (g.contains("nx")) c.nx = rd.integer(g["nx"], "grid.nx", 3, 100000);
        if (g.contains("nt")) c.nt = rd.integer(g["nt"], "grid.nt", 3, 10000000);
    }
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        rd.only_keys(s, "schedule", {"eps_max", "eps_min", "stop_tol", "max_picard"});
        if (s.contains("eps_max")) c.eps_max = rd.number(s["eps_max"], "schedule.eps_max", 1e-12, 1e3);
        if (s.contains("eps_min")) c.eps_min = rd.number(s["eps_min"], "schedule.eps_min", 1e-12, 1e3);
        if (s.contains("stop_tol")) c.stop_tol = rd.number(s["stop_tol"], "schedule.stop_tol", 1e-15, 1.0);
        if (s.contains("max_picard")) c.max_picard = rd.integer(s["max_picard"], "schedule.max_picard", 1, 10000000);
        if (c.eps_min > c.eps_max) rd.fail("schedule.eps_min", "must not exceed eps_max");
    }
    if (j.contains("rescale")) {
        const auto& r = j["rescale"];
        rd.only_keys(r, "rescale", {"alpha", "gamma", "M"});
        if (r.contains("alpha")) c.alpha = rd.number(r["alpha"], "rescale.alpha", 1e-6, 1.0 - 1e-6);
        if (r.contains("gamma")) c.gamma = rd.number(r["gamma"], "rescale.gamma", 1e-6, 1.0 - 1e-6);
        if (r.contains("M")) c.M = rd.number(r["M"], "rescale.M", 1.0 + 1e-9, 1e9);
        if (!(c.gamma < 1.0 - c.alpha)) rd.fail("rescale.gamma", "must be below 1 - alpha");
    }
    if (j.contains("weiss")) {
        const auto& w = j["weiss"];
        rd.only_keys(w, "weiss", {"variant", "radii", "origin"});
        if (w.contains("variant")) {
            const auto v = parse_weiss_variant(rd.string(w["variant"], "weiss.variant"));
            if (!v) rd.fail("weiss.variant", "expected paper-def or proof-2x");
            c.weiss_variant = *v;
        }
        if (w.contains("radii"))
            for (const auto& r : rd.array(w["radii"], "weiss.radii")) c.weiss_radii.push_back(rd.number(r, "weiss.radii", 1e-9, 1e3));
        if (w.contains("origin")) {
            const auto& o = rd.array(w["origin"], "weiss.origin");
            if (o.size() != 2) rd.fail("weiss.origin", "expected [x, t]");
            c.weiss_origin = std::array<double, 2>{rd.number(o[0], "weiss.origin", -1e6, 1e6),
                                                   rd.number(o[1], "weiss.origin", -1e6, 1e6)};
        }
    }
    if (j.contains("blowup")) {
        const auto& b = j["blowup"];
        rd.only_keys(b, "blowup", {"resolutions"});
        if (b.contains("resolutions")) {
            c.blowup_resolutions.clear();
            for (const auto& n : rd.array(b["resolutions"], "blowup.resolutions"))
                c.blowup_resolutions.push_back(rd.integer(n, "blowup.resolutions", 11, 100001));
            if (c.blowup_resolutions.size() < 2) rd.fail("blowup.resolutions", "needs at least two resolutions");
        }
    }
    if (j.contains("series")) {
        const auto& s = j["series"];
        rd.only_keys(s, "series", {"c", "N", "x_max", "slope"});
        if (s.contains("c")) {
            c.series_c.clear();
            for (const auto& v : rd.array(s["c"], "series.c")) c.series_c.push_back(rd.number(v, "series.c", 1e-9, 1e6));
        }
        if (s.contains("N")) c.series_N = rd.integer(s["N"], "series.N", 4, 100000);
        if (s.contains("x_max")) c.series_x_max = rd.number(s["x_max"], "series.x_max", 1.5, 1e3);
        if (s.contains("slope")) {
            const auto v = rd.string(s["slope"], "series.slope");
            if (v == "literal")
                c.series_slope = SlopeConvention::literal;
            else if (v == "matched")
                c.series_slope = SlopeConvention::matched;
            else
                rd.fail("series.slope", "expected literal or matched");
        }
    }
    if (j.contains("input_field")) c.input_field = rd.string(j["input_field"], "input_field");
    if (c.scenario == ScenarioLabel::custom && c.input_field.empty())
        rd.fail("input_field", "required for the custom scenario");
    if (j.contains("out_dir")) c.out_dir = rd.string(j["out_dir"], "out_dir");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path.string(), "", 0);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string resolve_out_dir(const std::string& requested) {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? std::string(env) : requested;
}

RunOutcome run_pipeline(const RunConfig& cfg) {
    const std::vector<Stage> stages = with_dependencies(cfg.stages.empty() ? default_stages(cfg.scenario) : cfg.stages);
    State st{cfg, {}, {}, 0.0, {}, {}, false};
    st.art.dir = cfg.out_dir;
    std::filesystem::create_directories(st.art.dir);

    json manifest;
    manifest["tool"] = version_string();
    manifest["config"] = config_echo(cfg, stages);
    json reports;
    json timings;
    std::set<Stage> failed;
    int exit_code = 0;
    for (Stage s : stages) {
        json rep;
        const bool blocked = std::any_of(failed.begin(), failed.end(), [&](Stage f) { return needs(s, f); });
        if (blocked) {
            rep["status"] = "skipped";
            rep["reason"] = "upstream stage failed";
            failed.insert(s);
            reports[to_string(s)] = rep;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            json body;
            switch (s) {
                case Stage::solve: body = stage_solve(st); break;
                case Stage::boundary: body = stage_boundary(st); break;
                case Stage::hodograph: body = stage_hodograph(st); break;
                case Stage::weiss: body = stage_weiss(st); break;
                case Stage::blowup: body = stage_blowup(st); break;
                case Stage::series: body = stage_series(st); break;
            }
            rep["status"] = st.numeric_failure && s == Stage::solve ? "not-converged" : "ok";
            rep["report"] = body;
        } catch (const std::exception& e) {
            rep["status"] = "failed";
            rep["error"] = e.what();
            failed.insert(s);
            exit_code = 3;
        }
        timings[to_string(s)] = seconds_since(t0);
        reports[to_string(s)] = rep;
    }
    if (st.numeric_failure) exit_code = 3;
    manifest["stages"] = reports;
    manifest["artifacts"] = st.art.list;

    RunOutcome out;
    out.exit_code = exit_code;
    out.manifest = st.art.dir / "manifest.json";
    out.manifest_text = manifest.dump(2) + "\n";
    {
        std::ofstream os = open_out(out.manifest);
        os << out.manifest_text;
    }
    std::ofstream ts = open_out(st.art.dir / "timings.json");
    ts << timings.dump(2) << "\n";
    return out;
}

}  // namespace ufb
