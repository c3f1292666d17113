#include "ufb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ufb {

namespace {

struct LabelInfo {
    ScenarioLabel label;
    std::string_view name;
    std::string_view blurb;
};

constexpr LabelInfo kLabels[] = {
    {ScenarioLabel::time_only, "time_only", "psi = max{t,0} on a box; exact solution max{t,0}, nonunique under time shifts"},
    {ScenarioLabel::local_cap, "local_cap", "psi = 0 on the box; least solution 0, forced heat solution as the alternative"},
    {ScenarioLabel::self_similar_1d, "self_similar_1d", "1D self-similar profile (series + ODE), handled by the profile tools"},
    {ScenarioLabel::elliptic_cross, "elliptic_cross", "frozen 2D cross-shaped input field for diagnostics (not solved)"},
    {ScenarioLabel::collapsing_interval, "collapsing_interval", "1D, u(x,0)=2x^2-1, lateral t+1, c=1; negative interval collapses"},
    {ScenarioLabel::custom, "custom", "user-supplied grid and data"},
};

}  // namespace

std::string_view to_string(ScenarioLabel l) {
    for (const auto& e : kLabels)
        if (e.label == l) return e.name;
    return "?";
}

std::string_view describe(ScenarioLabel l) {
    for (const auto& e : kLabels)
        if (e.label == l) return e.blurb;
    return "";
}

std::optional<ScenarioLabel> parse_scenario_label(std::string_view s) {
    for (const auto& e : kLabels)
        if (e.name == s) return e.label;
    return std::nullopt;
}

std::vector<ScenarioLabel> all_scenario_labels() {
    std::vector<ScenarioLabel> out;
    for (const auto& e : kLabels) out.push_back(e.label);
    return out;
}

void ScenarioSpec::validate() const {
    const std::size_t npl = grid.nodes_per_level();
    const auto bnodes = grid.boundary_nodes();
    if (initial.size() != npl) throw InvalidInput("scenario: initial data size does not match grid");
    if (lateral.size() != bnodes.size() * static_cast<std::size_t>(grid.nt))
        throw InvalidInput("scenario: lateral data size does not match grid boundary");
    if (!(c >= 0.0)) throw InvalidInput("scenario: monotonicity constant c must be >= 0");
    for (double v : initial)
        if (!std::isfinite(v)) throw InvalidInput("scenario: non-finite initial data");
    for (double v : lateral)
        if (!std::isfinite(v)) throw InvalidInput("scenario: non-finite lateral data");
    double scale = 1.0;
    for (double v : initial) scale = std::max(scale, std::abs(v));
    for (std::size_t b = 0; b < bnodes.size(); ++b) {
        if (std::abs(initial[bnodes[b]] - lateral_at(0, b)) > 1e-12 * scale) {
            std::ostringstream os;
            os << "scenario: initial and lateral data disagree at boundary node " << bnodes[b] << " ("
               << initial[bnodes[b]] << " vs " << lateral_at(0, b) << ")";
            throw InvalidInput(os.str());
        }
    }
    if (c > 0.0) {
        const double ht = grid.ht();
        for (int k = 0; k + 1 < grid.nt; ++k)
            for (std::size_t b = 0; b < bnodes.size(); ++b) {
                const double hi = lateral_at(k + 1, b), lo = lateral_at(k, b);
                const double slope = (hi - lo) / ht;
                // rounding of psi itself, relative to a small ht
                const double slack = c * 1e-12 + 8.0 * std::numeric_limits<double>::epsilon() *
                                                     std::max(std::abs(hi), std::abs(lo)) / ht;
                if (slope < c - slack) {
                    std::ostringstream os;
                    os << "scenario: lateral data slope " << slope << " < c = " << c << " at level " << k;
                    throw InvalidInput(os.str());
                }
            }
    }
}

ScenarioSpec make_scenario(const Grid& g, const DataFn& psi, double c, ScenarioLabel label) {
    ScenarioSpec s;
    s.grid = g;
    s.c = c;
    s.label = label;
    s.initial.resize(g.nodes_per_level());
    double xs[2] = {0.0, 0.0};
    for (std::size_t n = 0; n < g.nodes_per_level(); ++n) {
        g.coords(n, xs);
        s.initial[n] = psi(xs, g.t0);
    }
    const auto bnodes = g.boundary_nodes();
    s.lateral.resize(bnodes.size() * g.nt);
    for (int k = 0; k < g.nt; ++k)
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            g.coords(bnodes[b], xs);
            s.lateral[k * bnodes.size() + b] = psi(xs, g.t(k));
        }
    s.validate();
    return s;
}

ScenarioSpec make_time_only(const Grid& g) {
    return make_scenario(g, [](const double*, double t) { return std::max(t, 0.0); }, 0.0,
                         ScenarioLabel::time_only);
}

ScenarioSpec make_local_cap(const Grid& g) {
    return make_scenario(g, [](const double*, double) { return 0.0; }, 0.0, ScenarioLabel::local_cap);
}

ScenarioSpec make_collapsing_interval(const Grid& g) {
    if (g.dim != 1) throw InvalidInput("collapsing_interval: only the 1D problem has compatible corner data");
    if (g.a != -1.0 || g.b != 1.0) throw InvalidInput("collapsing_interval: spatial extent must be [-1,1]");
    if (g.t0 != 0.0) throw InvalidInput("collapsing_interval: time interval must start at 0");
    return make_scenario(
        g,
        [t0 = g.t0](const double* x, double t) { return t == t0 ? 2.0 * x[0] * x[0] - 1.0 : t + 1.0; },
        1.0, ScenarioLabel::collapsing_interval);
}

Grid default_grid(ScenarioLabel label, int nx) {
    switch (label) {
        case ScenarioLabel::time_only: return Grid::make(1, -1.0, 1.0, nx > 0 ? nx : 41, -0.5, 0.5, 101);
        case ScenarioLabel::local_cap: return Grid::make(1, -1.0, 1.0, nx > 0 ? nx : 81, 0.0, 1.0, 401);
        case ScenarioLabel::elliptic_cross: return Grid::make(2, -1.0, 1.0, nx > 0 ? nx : 65, 0.0, 1.0, 3);
        case ScenarioLabel::collapsing_interval: {
            const int n = nx > 0 ? nx : 401;
            const double hx = 2.0 / (n - 1);
            const double ht = hx / 50.0;
            const double horizon = 0.35;
            const int nt = static_cast<int>(std::lround(horizon / ht)) + 1;
            return Grid::make(1, -1.0, 1.0, n, 0.0, (nt - 1) * ht, nt);
        }
        case ScenarioLabel::self_similar_1d:
        case ScenarioLabel::custom: break;
    }
    throw InvalidInput("scenario '" + std::string(to_string(label)) + "' has no default solver grid");
}

ScenarioSpec make_default_scenario(ScenarioLabel label, int nx) {
    const Grid g = default_grid(label, nx);
    switch (label) {
        case ScenarioLabel::time_only: return make_time_only(g);
        case ScenarioLabel::local_cap: return make_local_cap(g);
        case ScenarioLabel::collapsing_interval: return make_collapsing_interval(g);
        default: break;
    }
    throw InvalidInput("scenario '" + std::string(to_string(label)) + "' is not solved by the regularized solver");
}

SpaceTimeField elliptic_cross_field(const Grid& g) {
    if (g.dim != 2) throw InvalidInput("elliptic_cross: requires a 2D grid");
    return SpaceTimeField::sample(g, [](const double* x, double) { return x[0] * x[0] - x[1] * x[1]; });
}

}  // namespace ufb
