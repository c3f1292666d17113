#include "ufb/blowup_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "ufb/errors.hpp"
#include "ufb/fit.hpp"

namespace ufb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// growth beyond the rounding of a difference quotient
bool grows(double next, double prev) { return next > prev * (1.0 + 1e-9); }

void require_1d(const SpaceTimeField& u, const char* who) {
    if (u.grid().dim != 1) throw InvalidInput(std::string(who) + ": 1D fields only");
}

}  // namespace

CollapsePoint locate_collapse(const SpaceTimeField& u) {
    require_1d(u, "locate_collapse");
    const Grid& g = u.grid();
    int last = -1;
    for (int k = 0; k < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            if (u.at(k, i) < 0.0) {
                last = k;
                break;
            }
    if (last < 0) throw InvalidInput("locate_collapse: u is never negative");
    if (last == g.nt - 1) {
        std::ostringstream os;
        os << "locate_collapse: negative set persists to the horizon t = " << g.t1 << "; use a longer horizon";
        throw DomainError(os.str());
    }
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.nx; ++i) m = std::min(m, u.at(last, i));
    int first_min = -1, last_min = -1;
    for (int i = 0; i < g.nx; ++i)
        if (u.at(last, i) == m) {
            if (first_min < 0) first_min = i;
            last_min = i;
        }
    CollapsePoint cp;
    cp.level = last;
    cp.node = static_cast<std::size_t>((first_min + last_min) / 2);
    cp.x_star = g.x(static_cast<int>(cp.node));
    cp.t_lo = g.t(last);
    cp.t_hi = g.t(last + 1);
    const double lo = u.at(last, cp.node), hi = u.at(last + 1, cp.node);
    cp.t_star = hi > lo ? cp.t_lo + (cp.t_hi - cp.t_lo) * (-lo) / (hi - lo) : cp.t_lo;
    cp.t_star = std::clamp(cp.t_star, cp.t_lo, cp.t_hi);
    return cp;
}

IntervalReport negative_set_interval_check(const SpaceTimeField& u) {
    require_1d(u, "negative_set_interval_check");
    const Grid& g = u.grid();
    IntervalReport r;
    for (int k = 0; k < g.nt; ++k) {
        ++r.levels_checked;
        int runs = 0;
        bool inside = false;
        for (int i = 0; i < g.nx; ++i) {
            const bool neg = u.at(k, i) < 0.0;
            if (neg && !inside) ++runs;
            inside = neg;
        }
        if (runs > 1) {
            if (r.first_violation < 0) r.first_violation = k;
            ++r.violations;
        }
    }
    return r;
}

UtTable ut_sup_table(const SpaceTimeField& u, const CollapsePoint& cp, std::vector<double> rhos) {
    require_1d(u, "ut_sup_table");
    const Grid& g = u.grid();
    std::sort(rhos.begin(), rhos.end(), std::greater<>());
    UtTable t;
    t.nx = g.nx;
    t.hx = g.hx();
    t.ht = g.ht();
    t.cp = cp;
    t.rhos = rhos;
    t.annulus_sup.assign(rhos.size(), kNaN);
    t.full_sup.assign(rhos.size(), kNaN);
    t.annulus_nodes.assign(rhos.size(), 0);
    std::vector<double> ann(rhos.size(), -std::numeric_limits<double>::infinity()), full = ann;
    const double ht = g.ht();
    for (int k = 0; k + 1 < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i) {
            if (!(u.at(k, i) > ht)) continue;
            const double d = std::abs(g.x(i) - cp.x_star) + std::sqrt(std::abs(g.t(k) - cp.t_star));
            if (d >= rhos.front()) continue;
            const double ut = (u.at(k + 1, i) - u.at(k, i)) / ht;
            for (std::size_t j = 0; j < rhos.size(); ++j) {
                if (d >= rhos[j]) break;
                full[j] = std::max(full[j], ut);
                if (d >= 0.5 * rhos[j]) {
                    ann[j] = std::max(ann[j], ut);
                    ++t.annulus_nodes[j];
                }
            }
        }
    for (std::size_t j = 0; j < rhos.size(); ++j) {
        if (rhos[j] < 2.0 * t.hx || t.annulus_nodes[j] < 4) continue;
        t.annulus_sup[j] = ann[j];
        t.full_sup[j] = full[j];
    }
    return t;
}

std::string to_string(TrendVerdict v) {
    switch (v) {
        case TrendVerdict::unbounded_consistent: return "unbounded-consistent";
        case TrendVerdict::saturated: return "saturated";
        case TrendVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<double> dyadic_rhos(double rho_max, double rho_min) {
    if (!(rho_max > 0.0) || !(rho_min > 0.0)) throw ParameterError("dyadic_rhos: radii must be positive");
    std::vector<double> r;
    for (double x = rho_max; x >= rho_min; x *= 0.5) r.push_back(x);
    return r;
}

BlowupTrend ut_blowup_trend(const std::vector<SpaceTimeField>& us, const std::vector<double>& rhos,
                            const std::optional<CollapsePoint>& center) {
    if (us.size() < 2) throw InvalidInput("ut_blowup_trend: needs at least two resolutions");
    BlowupTrend tr;
    for (const auto& u : us) tr.tables.push_back(ut_sup_table(u, center ? *center : locate_collapse(u), rhos));
    for (std::size_t m = 1; m < tr.tables.size(); ++m)
        if (tr.tables[m].nx <= tr.tables[m - 1].nx)
            throw InvalidInput("ut_blowup_trend: fields must be ordered by increasing nx");

    const auto& rs = tr.tables.front().rhos;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    tr.increases_as_rho_decreases = true;
    for (const auto& t : tr.tables) {
        std::vector<double> x, y;
        double prev = kNaN;
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const double s = t.annulus_sup[j];
            if (std::isnan(s)) continue;
            if (!std::isnan(prev) && !grows(s, prev)) tr.increases_as_rho_decreases = false;
            prev = s;
            x.push_back(rs[j]);
            y.push_back(s);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        tr.slopes.push_back(x.size() >= 2 && y.front() > 0 ? loglog_slope(x, y) : kNaN);
        if (x.size() < 2) tr.increases_as_rho_decreases = false;
    }
    tr.spread = hi > 0 && lo > 0 ? hi / lo : kNaN;

    tr.increases_with_resolution = true;
    int common = 0;
    for (std::size_t j = 0; j < rs.size(); ++j) {
        bool all = true;
        for (const auto& t : tr.tables) all = all && !std::isnan(t.annulus_sup[j]);
        if (!all) continue;
        ++common;
        tr.finest_common_rho = rs[j];
        for (std::size_t m = 1; m < tr.tables.size(); ++m)
            if (!grows(tr.tables[m].annulus_sup[j], tr.tables[m - 1].annulus_sup[j])) tr.increases_with_resolution = false;
    }
    if (common == 0) tr.increases_with_resolution = false;

    const double finest_slope = tr.slopes.back();
    if (!std::isnan(tr.spread) && tr.spread < 1.0 + 1e-3) {
        tr.verdict = TrendVerdict::saturated;
        tr.reason = "annulus sups agree to 1e-3 across radii and resolutions";
    } else if (tr.increases_with_resolution && tr.increases_as_rho_decreases && finest_slope < 0.0) {
        tr.verdict = TrendVerdict::unbounded_consistent;
        tr.reason = "sup u_t grows with resolution and as rho decreases";
    } else {
        std::ostringstream os;
        os << "resolution trend " << (tr.increases_with_resolution ? "ok" : "broken") << ", rho trend "
           << (tr.increases_as_rho_decreases ? "ok" : "broken") << ", finest slope " << finest_slope;
        tr.verdict = TrendVerdict::inconclusive;
        tr.reason = os.str();
    }
    return tr;
}

CollapseReport analyze_collapse(const std::vector<SpaceTimeField>& us, const std::vector<double>& rhos,
                                const CollapseOptions& opt) {
    CollapseReport r;
    r.trend = ut_blowup_trend(us, rhos);
    for (const auto& t : r.trend.tables) r.points.push_back(t.cp);
    const double window = 2.0 * r.trend.tables.front().ht;
    r.brackets_consistent = true;
    for (const auto& p : r.points)
        if (std::abs(p.t_star - r.points.front().t_star) > window) r.brackets_consistent = false;

    const SpaceTimeField& u = us.back();
    const CollapsePoint& cp = r.points.back();
    r.interval = negative_set_interval_check(u);
    r.ut_lower = check_time_monotonicity(u, opt.c, opt.ut_tol, true);

    const FreeBoundaryGraph fb = extract_graph(u);
    r.pinching = pinching_check(fb, u, cp.node, opt.alpha);

    // boundary points approaching x_star from the right, dyadic distances
    const Grid& g = u.grid();
    std::vector<BoundaryPoint> pts;
    for (double d = 0.4; d >= 4.0 * g.hx(); d *= 0.5) {
        const auto i = static_cast<std::size_t>(std::lround((cp.x_star + d - g.a) / g.hx()));
        if (i >= static_cast<std::size_t>(g.nx) || !fb.valid[i]) continue;
        BoundaryPoint p;
        p.x = {g.x(static_cast<int>(i)), 0.0};
        p.t = fb.H[i];
        p.grad_norm = interpolated_grad_norm(u, p.x.data(), p.t);
        if (p.grad_norm > 0.0) pts.push_back(p);
    }
    try {
        r.scaling = scaling_law(u, pts, opt.M, opt.gamma);
    } catch (const std::exception& e) {
        r.scaling_error = e.what();
    }
    return r;
}

void write_ut_table_csv(std::ostream& os, const BlowupTrend& t) {
    os << "nx,rho,annulus_sup,full_sup,annulus_nodes\n" << std::setprecision(12);
    for (const auto& tab : t.tables)
        for (std::size_t j = 0; j < tab.rhos.size(); ++j)
            os << tab.nx << ',' << tab.rhos[j] << ',' << tab.annulus_sup[j] << ',' << tab.full_sup[j] << ','
               << tab.annulus_nodes[j] << '\n';
}

void write_collapse_summary(std::ostream& os, const CollapseReport& r) {
    os << std::setprecision(10);
    for (std::size_t m = 0; m < r.points.size(); ++m) {
        const auto& p = r.points[m];
        os << "nx_" << r.trend.tables[m].nx << ".t_star," << p.t_star << '\n'
           << "nx_" << r.trend.tables[m].nx << ".t_bracket," << p.t_lo << ' ' << p.t_hi << '\n'
           << "nx_" << r.trend.tables[m].nx << ".x_star," << p.x_star << '\n';
    }
    os << "brackets_consistent," << r.brackets_consistent << '\n'
       << "interval_violations," << r.interval.violations << '\n'
       << "ut_min_slope_positive_side," << r.ut_lower.min_slope << '\n'
       << "pinching_status," << to_string(r.pinching.status) << '\n'
       << "pinching_exponent," << r.pinching.exponent << '\n'
       << "trend_verdict," << to_string(r.trend.verdict) << '\n'
       << "trend_finest_slope," << r.trend.slopes.back() << '\n'
       << "scaling_slope," << r.scaling.slope << '\n';
}

}  // namespace ufb
