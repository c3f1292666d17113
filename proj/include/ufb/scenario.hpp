#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

enum class ScenarioLabel { time_only, local_cap, self_similar_1d, elliptic_cross, collapsing_interval, custom };

std::string_view to_string(ScenarioLabel l);
std::optional<ScenarioLabel> parse_scenario_label(std::string_view s);
std::vector<ScenarioLabel> all_scenario_labels();
/// One-line description used by `list-scenarios`.
std::string_view describe(ScenarioLabel l);

/// Boundary data psi for the initial-boundary value problem on a box.
///
/// `lateral` holds psi on the spatial boundary for every time level
/// (level-major, Grid::boundary_nodes() order); level 0 must agree with
/// `initial` at those nodes. c > 0 asserts psi_t >= c on the lateral data.
struct ScenarioSpec {
    Grid grid;
    std::vector<double> initial;
    std::vector<double> lateral;
    double c = 0.0;
    ScenarioLabel label = ScenarioLabel::custom;

    std::size_t boundary_count() const { return lateral.size() / grid.nt; }
    double lateral_at(int k, std::size_t b) const { return lateral[k * boundary_count() + b]; }

    /// Throws InvalidInput naming the first violated invariant.
    void validate() const;
};

using DataFn = std::function<double(const double* x, double t)>;

/// psi sampled from a closed-form function on the grid's parabolic boundary.
ScenarioSpec make_scenario(const Grid& g, const DataFn& psi, double c, ScenarioLabel label);

/// psi = max{t,0}; the least solution is max{t,0} itself.
ScenarioSpec make_time_only(const Grid& g);
/// psi == 0 on the box.
ScenarioSpec make_local_cap(const Grid& g);
/// 1D only: u(x,0) = 2x^2 - 1 on [-1,1], u = t + 1 on the lateral boundary, c = 1.
ScenarioSpec make_collapsing_interval(const Grid& g);

/// Default desk-scale grid per scenario (collapsing_interval takes nx; ht = hx/50).
Grid default_grid(ScenarioLabel label, int nx = 0);
ScenarioSpec make_default_scenario(ScenarioLabel label, int nx = 0);

/// Frozen, time-independent 2D input with a cross-shaped zero set through the
/// origin: u = x1^2 - x2^2, the homogeneous harmonic leading term of the
/// cross singularity. It is a diagnostic input only and is not solved for.
SpaceTimeField elliptic_cross_field(const Grid& g);

}  // namespace ufb
