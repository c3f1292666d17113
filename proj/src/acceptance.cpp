#include "ufb/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "ufb/blowup_analysis.hpp"
#include "ufb/free_boundary.hpp"
#include "ufb/hodograph.hpp"
#include "ufb/regularized_solver.hpp"
#include "ufb/scenario.hpp"
#include "ufb/selfsimilar_series.hpp"

namespace ufb {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

struct Solved {
    SpaceTimeField u;
    LeastSolutionResult meta;
};

// Runs the full schedule; an unconverged tail still yields the last solution.
Solved solve_full(const ScenarioSpec& spec, const RegularizationSchedule& sched) {
    try {
        auto r = least_solution(spec, sched);
        SpaceTimeField u = r.u;
        return {std::move(u), std::move(r)};
    } catch (const LeastSolutionNotConverged& e) {
        return {e.partial().u, e.partial()};
    }
}

class Context {
public:
    explicit Context(const AcceptanceOptions& o) : opt(o) {}
    const AcceptanceOptions& opt;

    const Solved& local_cap() {
        if (!local_cap_) {
            const Grid g = default_grid(ScenarioLabel::local_cap, 401);
            local_cap_ = solve_full(make_local_cap(g), RegularizationSchedule::default_schedule());
        }
        return *local_cap_;
    }
    const Solved& collapse_full() {
        if (!collapse_)
            collapse_ = solve_full(make_default_scenario(ScenarioLabel::collapsing_interval, 401),
                                   RegularizationSchedule::default_schedule());
        return *collapse_;
    }
    const CollapseReport& collapse_report() {
        if (!report_) {
            auto sched = RegularizationSchedule::default_schedule();
            sched.stop_tol = 1e-4;
            std::vector<SpaceTimeField> us;
            for (int n : {201, 401, 801})
                us.push_back(solve_full(make_default_scenario(ScenarioLabel::collapsing_interval, n), sched).u);
            report_ = analyze_collapse(us, dyadic_rhos(0.4, 0.004));
        }
        return *report_;
    }

private:
    std::optional<Solved> local_cap_, collapse_;
    std::optional<CollapseReport> report_;
};

using Check = std::function<void(Context&, CriterionResult&)>;

void series_anchors(Context&, CriterionResult& r) {
    double worst3 = 0, worst4 = 0;
    bool a2_exact = true;
    for (double c : {0.1, 1.0, 10.0}) {
        const auto s = series_coefficients(c, 200);
        worst3 = std::max(worst3, std::abs(static_cast<double>(s.coeffs[3]) + kSqrt2 / 12));
        worst4 = std::max(worst4, std::abs(static_cast<double>(s.coeffs[4]) + 1.0 / 48));
        a2_exact = a2_exact && s.coeffs[2] == kSqrt2L / 4 * static_cast<long double>(c) - 0.5L;
    }
    r.pass = worst3 < 1e-12 && worst4 < 1e-12 && a2_exact;
    r.detail = "|a3 + sqrt2/12| = " + fmt(worst3) + ", |a4 + 1/48| = " + fmt(worst4) +
               ", a2 exact = " + (a2_exact ? "yes" : "no");
}

void sign_propagation(Context&, CriterionResult& r) {
    r.pass = true;
    std::string d;
    for (double c : {0.1, 1.0, 10.0}) {
        const auto s = series_coefficients(c, 200);
        r.pass = r.pass && s.signs_ok();
        d += "c=" + fmt(c) + (s.signs_ok() ? " ok" : " first a_n >= 0 at n=" + std::to_string(s.first_nonnegative)) + "; ";
    }
    r.detail = d + "n in [3, 200], long double";
}

void eventual_negativity(Context&, CriterionResult& r) {
    r.pass = true;
    std::string d;
    for (double c : {0.1, 1.0, 10.0}) {
        const auto neg = negativity_finder(c, 20.0);
        const auto p = ode_integrate(c, kSqrt2 + 0.5, 1e-3);
        const auto s = series_coefficients(c, 200);
        double diff = 0;
        for (std::size_t k = 0; k < p.x.size(); ++k) diff = std::max(diff, std::abs(evaluate_series(s, p.x[k]).value - p.f[k]));
        const bool ok = neg.confirmed && neg.x_zero < 20.0 && diff < 1e-6;
        r.pass = r.pass && ok;
        d += "c=" + fmt(c) + " x_zero=" + fmt(neg.x_zero) + " series-ode=" + fmt(diff) + "; ";
    }
    r.detail = d;
}

void exact_residuals(Context&, CriterionResult& r) {
    // max{t,0}
    const Grid g1 = Grid::make(1, -1.0, 1.0, 101, -0.5, 0.5, 101);
    const auto u1 = SpaceTimeField::sample(g1, [](const double*, double t) { return std::max(t, 0.0); });
    const auto res1 = residual_away_from_interface(u1, 1e-12);
    const auto fb1 = extract_graph(u1);
    double h1 = 0;
    for (std::size_t i = 0; i < fb1.H.size(); ++i) h1 = std::max(h1, fb1.valid[i] ? std::abs(fb1.H[i]) : 1.0);
    const auto lip1 = lipschitz_report(fb1, u1, 1.0);

    // t - |x| solves the equation on {u > 0} away from the ridge x = 0
    const Grid g2 = Grid::make(1, -1.0, 1.0, 101, 0.0, 1.5, 151);
    const auto u2 = SpaceTimeField::sample(g2, [](const double* x, double t) { return t - std::abs(x[0]); });
    const auto res = equation_residual(u2);
    double res2 = 0;
    std::size_t n2 = 0;
    for (int k = 1; k < g2.nt; ++k)
        for (int i = 2; i + 2 < g2.nx; ++i) {
            if (std::abs(g2.x(i)) < 1.5 * g2.hx()) continue;
            const bool positive = u2.at(k - 1, i) > 0 && u2.at(k, i - 1) > 0 && u2.at(k, i + 1) > 0 && u2.at(k, i) > 0;
            if (!positive) continue;
            res2 = std::max(res2, std::abs(res.at(k, i)));
            ++n2;
        }
    const auto fb2 = extract_graph(u2);
    double h2 = 0;
    for (int i = 0; i < g2.nx; ++i) h2 = std::max(h2, fb2.valid[i] ? std::abs(fb2.H[i] - std::abs(g2.x(i))) : 1.0);
    const auto lip2 = lipschitz_report(fb2, u2, 1.0);

    r.pass = res1.max_abs < 1e-8 && res1.nodes_checked > 0 && h1 < 1e-12 && lip1.pass && res2 < 1e-8 && n2 > 0 &&
             h2 < 1e-12 && lip2.pass && std::abs(lip2.lip - 1.0) < 1e-9;
    r.detail = "max{t,0}: residual " + fmt(res1.max_abs) + ", |H| " + fmt(h1) + ", Lip " + fmt(lip1.lip) +
               "; t-|x|: residual " + fmt(res2) + " on " + std::to_string(n2) + " nodes, |H-|x|| " + fmt(h2) +
               ", Lip " + fmt(lip2.lip) + " (bound " + fmt(lip2.bound) + ")";
}

void eps_monotonicity(Context& ctx, CriterionResult& r) {
    r.pass = true;
    std::string d;
    for (auto* s : {&ctx.local_cap(), &ctx.collapse_full()}) {
        const auto& m = s->meta;
        const double min_diff = m.tail_min_diffs.empty() ? 0.0 : *std::min_element(m.tail_min_diffs.begin(), m.tail_min_diffs.end());
        bool decreasing = true;
        for (std::size_t k = 1; k < m.tail_sup_diffs.size(); ++k)
            decreasing = decreasing && m.tail_sup_diffs[k] <= m.tail_sup_diffs[k - 1];
        const double last = m.tail_sup_diffs.empty() ? 0.0 : m.tail_sup_diffs.back();
        const bool ok = min_diff >= -kEpsMonotoneTol && decreasing && last < 1e-6;
        r.pass = r.pass && ok;
        d += std::string(s == &ctx.local_cap() ? "local_cap" : "collapsing_interval") + ": min diff " + fmt(min_diff) +
             ", tail " + (decreasing ? "decreasing" : "not decreasing") + ", last " + fmt(last) + " after " +
             std::to_string(m.eps_used.size()) + " eps; ";
    }
    r.detail = d;
}

void ut_propagation(Context& ctx, CriterionResult& r) {
    const auto rep = check_time_monotonicity(ctx.collapse_full().u, 1.0, 1e-3, true);
    r.pass = rep.min_slope >= 1.0 - 1e-3;
    r.detail = "min forward slope on {u>0} = " + fmt(rep.min_slope);
}

void weiss_anchors(Context& ctx, CriterionResult& r) {
    const Grid wide = Grid::make(1, -8.0, 8.0, 1601, -1.2, 0.0, 1201);
    const auto ut = SpaceTimeField::sample(wide, [](const double*, double t) { return t; });
    double anchor = 0;
    for (auto v : {WeissVariant::paper_def, WeissVariant::proof_2x})
        for (double rr : {0.1, 0.2, 0.4}) anchor = std::max(anchor, std::abs(weiss_energy(ut, {}, rr, {v}).psi + 7.5));
    const auto lin = SpaceTimeField::sample(wide, [](const double* x, double t) { return t + 0.1 * x[0]; });
    const auto dc = weiss_derivative_check(lin, {}, 0.5, 0.01, {ctx.opt.variant});

    const auto& u = ctx.collapse_full().u;
    const auto cp = locate_collapse(u);
    SpaceTimePoint o;
    o.x = {cp.x_star, 0.0};
    o.t = cp.t_star;
    const auto curve = weiss_curve(u, o, {0.24, 0.2, 0.16, 0.12, 0.08, 0.05}, {ctx.opt.variant});
    r.pass = anchor < 1e-3 && dc.rel_error < 0.05 && curve.monotone(1e-3);
    r.detail = "|psi(t) + 7.5| = " + fmt(anchor) + ", derivative rel error " + fmt(dc.rel_error) +
               ", collapse min dpsi/dr " + fmt(curve.min_slope) + " (" + std::string(to_string(ctx.opt.variant)) +
               ", kernel mass >= " + fmt(curve.kernel_mass_min) + ")";
}

void hodograph_identities(Context& ctx, CriterionResult& r) {
    const Grid g = Grid::make(2, -1.0, 1.0, 65, 0.0, 0.1, 3);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double) { return x[1] + 0.1 * std::sin(x[0]); });
    const auto h = hodograph_transform(u, 0.5);
    const auto id = derivative_identities(u, h);

    const auto& uc = ctx.collapse_full().u;
    const auto fb = extract_graph(uc);
    const Grid& gc = uc.grid();
    double lam = std::numeric_limits<double>::infinity();
    int points = 0;
    for (double xq : {0.2, 0.3, 0.5, 0.7}) {
        const auto i = static_cast<int>(std::lround((xq - gc.a) / gc.hx()));
        if (!fb.valid[i]) continue;
        const double x[1] = {gc.x(i)};
        const auto p = RescaleParams::make({x[0], 0.0}, fb.H[i], interpolated_grad_norm(uc, x, fb.H[i]), 20.0);
        const auto rf = rescale(uc, p, 65);
        const auto cm = coefficient_matrix(hodograph_transform(rf.ur, 0.1));
        lam = std::min(lam, cm.lambda_min);
        ++points;
    }
    r.pass = id.worst() < 1e-5 && id.nodes > 0 && points == 4 && lam > 0.0;
    r.detail = "worst identity residual " + fmt(id.worst()) + " on " + std::to_string(id.nodes) +
               " nodes; rescaled collapse data (M=20) lambda_min " + fmt(lam) + " over " + std::to_string(points) +
               " boundary points";
}

void blowup_trend(Context& ctx, CriterionResult& r) {
    const auto& rep = ctx.collapse_report();
    std::vector<SpaceTimeField> ctrl;
    for (int n : {201, 401, 801}) {
        const Grid g = Grid::make(1, -1.0, 1.0, n, -0.5, 0.5, 2 * n - 1);
        ctrl.push_back(SpaceTimeField::sample(g, [](const double*, double t) { return std::max(t, 0.0); }));
    }
    const auto control = ut_blowup_trend(ctrl, dyadic_rhos(0.4, 0.004), CollapsePoint{});
    const auto& t = rep.trend;
    r.pass = t.verdict == TrendVerdict::unbounded_consistent && control.verdict == TrendVerdict::saturated;
    std::string sups;
    const std::size_t j = static_cast<std::size_t>(
        std::find(t.tables.front().rhos.begin(), t.tables.front().rhos.end(), t.finest_common_rho) -
        t.tables.front().rhos.begin());
    for (const auto& tab : t.tables) sups += " " + fmt(tab.annulus_sup[j]);
    r.detail = "verdict " + to_string(t.verdict) + ", sup u_t at rho=" + fmt(t.finest_common_rho) + ":" + sups +
               ", finest slope " + fmt(t.slopes.back()) + "; control " + to_string(control.verdict);
}

void pinching(Context& ctx, CriterionResult& r) {
    const auto& p = ctx.collapse_report().pinching;
    r.pass = p.status == PinchingStatus::pass && p.exponent >= 1.35;
    r.detail = "exponent " + fmt(p.exponent) + " (>= 1.35), status " + to_string(p.status) + ", |grad u(x*)| " +
               fmt(p.grad_at_x0);
}

struct Entry {
    int id;
    const char* title;
    double budget;
    Check run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = {
        {1, "series anchors", 1, series_anchors},
        {2, "sign propagation", 1, sign_propagation},
        {3, "eventual negativity", 5, eventual_negativity},
        {4, "exact-solution residuals", 10, exact_residuals},
        {5, "eps-monotonicity and least-solution convergence", 60, eps_monotonicity},
        {6, "u_t >= c propagation", 60, ut_propagation},
        {7, "Weiss anchors", 30, weiss_anchors},
        {8, "hodograph identities", 20, hodograph_identities},
        {9, "blow-up trend", 300, blowup_trend},
        {10, "pinching exponent", 300, pinching},
    };
    return e;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    Context ctx(opt);
    std::vector<CriterionResult> out;
    for (const auto& e : entries()) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), e.id) == opt.only.end()) continue;
        CriterionResult r;
        r.id = e.id;
        r.title = e.title;
        r.budget = e.budget;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(ctx, r);
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("error: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.seconds > r.budget) {
            r.pass = false;
            r.detail += "; over the " + fmt(r.budget) + " s budget";
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << r.title << ": " << r.detail << " ("
       << std::fixed << std::setprecision(2) << r.seconds << " s)";
    return os.str();
}

}  // namespace ufb
