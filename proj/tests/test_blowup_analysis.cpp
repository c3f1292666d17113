#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ufb/blowup_analysis.hpp"
#include "ufb/scenario.hpp"

using namespace ufb;

namespace {

SpaceTimeField solve_collapse(int nx) {
    auto sched = RegularizationSchedule::default_schedule();
    sched.stop_tol = 1e-4;
    return least_solution(make_default_scenario(ScenarioLabel::collapsing_interval, nx), sched).u;
}

}  // namespace

TEST_CASE("locate_collapse on the inner profile t + x^2/2") {
    const Grid g = Grid::make(1, -1.0, 1.0, 101, -0.5, 0.5, 101);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return t + 0.5 * x[0] * x[0]; });
    const auto cp = locate_collapse(u);
    CHECK(cp.t_star == doctest::Approx(0.0).scale(1.0));
    CHECK(cp.x_star == doctest::Approx(0.0).scale(1.0));
    CHECK(cp.t_lo < 0.0);
    CHECK(cp.t_hi == doctest::Approx(0.0).scale(1.0));
    CHECK(negative_set_interval_check(u).pass());
}

TEST_CASE("locate_collapse errors") {
    const Grid g = Grid::make(1, -1.0, 1.0, 41, 0.0, 1.0, 11);
    const auto neg = SpaceTimeField::sample(g, [](const double* x, double) { return x[0] * x[0] - 0.5; });
    CHECK_THROWS_AS(locate_collapse(neg), DomainError);
    const auto pos = SpaceTimeField::sample(g, [](const double*, double t) { return t + 1.0; });
    CHECK_THROWS_AS(locate_collapse(pos), InvalidInput);
}

TEST_CASE("two negative intervals are reported") {
    const Grid g = Grid::make(1, -1.0, 1.0, 81, 0.0, 1.0, 11);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) {
        const double q = x[0] * x[0] - 0.25;
        return q * q - 0.01 + 0.0 * t;
    });
    const auto r = negative_set_interval_check(u);
    CHECK_FALSE(r.pass());
    CHECK(r.violations == 11);
    CHECK(r.first_violation == 0);
}

TEST_CASE("negative control: max{t,0} saturates") {
    std::vector<SpaceTimeField> us;
    for (int n : {201, 401, 801}) {
        const Grid g = Grid::make(1, -1.0, 1.0, n, -0.5, 0.5, 2 * n - 1);
        us.push_back(SpaceTimeField::sample(g, [](const double*, double t) { return std::max(t, 0.0); }));
    }
    CollapsePoint origin;  // the last free boundary point in time is not isolated here
    const auto tr = ut_blowup_trend(us, dyadic_rhos(0.4, 0.004), origin);
    CHECK(tr.verdict == TrendVerdict::saturated);
    CHECK(tr.spread == doctest::Approx(1.0));
    CHECK_FALSE(tr.increases_with_resolution);
}

TEST_CASE("unresolved radii are NaN") {
    const Grid g = Grid::make(1, -1.0, 1.0, 41, -0.5, 0.5, 81);
    const auto u = SpaceTimeField::sample(g, [](const double*, double t) { return std::max(t, 0.0); });
    const auto t = ut_sup_table(u, CollapsePoint{}, {0.4, 0.02});
    CHECK(t.rhos.front() == 0.4);
    CHECK(t.annulus_sup[0] == doctest::Approx(1.0));
    CHECK(std::isnan(t.annulus_sup[1]));  // below 2 hx
}

TEST_CASE("collapsing interval: trend, pinching, interval property, u_t >= 1") {
    std::vector<SpaceTimeField> us;
    for (int n : {201, 401, 801}) us.push_back(solve_collapse(n));
    const auto r = analyze_collapse(us, dyadic_rhos(0.4, 0.004));
    for (std::size_t m = 0; m < r.points.size(); ++m)
        CHECK(std::abs(r.points[m].x_star) <= 2.0 * us[m].grid().hx());
    CHECK(r.points.back().t_star > 0.1);
    CHECK(r.points.back().t_star < 0.35);
    CHECK(r.brackets_consistent);
    CHECK(r.interval.pass());
    CHECK(r.ut_lower.min_slope >= 1.0 - 1e-3);
    CHECK(r.pinching.status == PinchingStatus::pass);
    CHECK(r.pinching.exponent >= 1.35);
    CHECK(r.trend.verdict == TrendVerdict::unbounded_consistent);
    CHECK(r.trend.slopes.back() < 0.0);
    CHECK(r.scaling_error.empty());
    CHECK(r.scaling.pass);

    std::ostringstream os;
    write_ut_table_csv(os, r.trend);
    CHECK(os.str().rfind("nx,rho,annulus_sup,full_sup,annulus_nodes\n", 0) == 0);
}
