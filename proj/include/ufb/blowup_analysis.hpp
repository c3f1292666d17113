#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ufb/free_boundary.hpp"
#include "ufb/grid.hpp"
#include "ufb/hodograph.hpp"
#include "ufb/regularized_solver.hpp"

namespace ufb {

/// Last point in time where u(., t) takes negative values (1D).
struct CollapsePoint {
    double x_star = 0.0;
    double t_star = 0.0;  // zero of u(x_star, .) interpolated between t_lo and t_hi
    double t_lo = 0.0;    // last level with min u < 0
    double t_hi = 0.0;    // next level
    int level = -1;       // index of t_lo
    std::size_t node = 0; // index of x_star
};

/// x_star is the midpoint of the minimisers at the last negative level.
/// Throws InvalidInput if u is never negative and DomainError if the
/// negative set reaches the final level (the horizon is too short).
CollapsePoint locate_collapse(const SpaceTimeField& u);

struct IntervalReport {
    int levels_checked = 0;
    int violations = 0;
    int first_violation = -1;
    bool pass() const { return violations == 0; }
};

/// Checks that {u(., t) < 0} is a set of consecutive nodes at every level.
IntervalReport negative_set_interval_check(const SpaceTimeField& u);

/// sup u_t by forward differences over nodes with u > ht, in the annulus
/// rho/2 <= |x - x*| + |t - t*|^{1/2} < rho and in the full cylinder.
struct UtTable {
    int nx = 0;
    double hx = 0.0, ht = 0.0;
    CollapsePoint cp;
    std::vector<double> rhos;         // decreasing
    std::vector<double> annulus_sup;  // NaN where unresolved
    std::vector<double> full_sup;
    std::vector<std::size_t> annulus_nodes;
};

/// Entries with rho < 2 hx or fewer than 4 annulus nodes are unresolved.
UtTable ut_sup_table(const SpaceTimeField& u, const CollapsePoint& cp, std::vector<double> rhos);

enum class TrendVerdict { unbounded_consistent, saturated, inconclusive };
std::string to_string(TrendVerdict v);

struct BlowupTrend {
    std::vector<UtTable> tables;  // increasing resolution
    TrendVerdict verdict = TrendVerdict::inconclusive;
    std::string reason;
    bool increases_with_resolution = false;  // at every rho resolved by all tables
    bool increases_as_rho_decreases = false; // within every table
    double finest_common_rho = 0.0;
    std::vector<double> slopes;  // log-log slope of annulus sup vs rho per table
    double spread = 0.0;         // max / min of all resolved annulus sups
};

/// Fields must be ordered by increasing nx. A table with a spread below
/// 1 + 1e-3 is saturated. Without `center` each field is centred at its own
/// collapse point; fields that are never negative need an explicit centre.
BlowupTrend ut_blowup_trend(const std::vector<SpaceTimeField>& us, const std::vector<double>& rhos,
                            const std::optional<CollapsePoint>& center = std::nullopt);

/// Dyadic radii 0.4, 0.2, ... down to the first value below rho_min.
std::vector<double> dyadic_rhos(double rho_max, double rho_min);

struct CollapseReport {
    std::vector<CollapsePoint> points;  // one per resolution
    bool brackets_consistent = false;   // t_star values within 2 ht of the coarsest grid
    IntervalReport interval;            // finest resolution
    TimeMonotonicityReport ut_lower;    // finest, on {u > 0}
    PinchingReport pinching;            // finest, at x_star
    BlowupTrend trend;
    ScalingLawReport scaling;           // finest
    std::string scaling_error;          // set when the cross-check could not run
};

struct CollapseOptions {
    double alpha = 0.5;
    double M = 1.0;
    double gamma = 0.25;
    double c = 1.0;
    double ut_tol = 1e-3;
};

/// Full analysis over solutions of the same scenario at increasing resolution.
CollapseReport analyze_collapse(const std::vector<SpaceTimeField>& us, const std::vector<double>& rhos,
                                const CollapseOptions& opt = {});

/// Columns nx, rho, annulus_sup, full_sup, annulus_nodes.
void write_ut_table_csv(std::ostream& os, const BlowupTrend& t);

/// key,value lines summarising the report.
void write_collapse_summary(std::ostream& os, const CollapseReport& r);

}  // namespace ufb
