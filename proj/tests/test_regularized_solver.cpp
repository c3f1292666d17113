#include <cmath>
#include <random>

#include "doctest.h"
#include "ufb/regularized_solver.hpp"

using namespace ufb;

TEST_CASE("f_eps is the piecewise-linear Heaviside regularization") {
    CHECK(f_eps(-1.0, 0.1) == 0.0);
    CHECK(f_eps(0.0, 0.1) == 0.0);
    CHECK(f_eps(0.05, 0.1) == doctest::Approx(0.5));
    CHECK(f_eps(0.1, 0.1) == 1.0);
    CHECK(f_eps(5.0, 0.1) == 1.0);
    CHECK_THROWS_AS(f_eps(1.0, 0.0), ParameterError);
}

TEST_CASE("schedule validation") {
    auto s = RegularizationSchedule::default_schedule();
    CHECK(s.eps_values.size() == 13u);
    CHECK(s.eps_values.front() == doctest::Approx(0.1));
    CHECK(s.eps_values.back() == doctest::Approx(0.1 / 4096.0));
    s.validate();
    s.eps_values = {0.1, 0.2};
    CHECK_THROWS(s.validate());
}

TEST_CASE("time_only: the least solution is max{t,0}") {
    const auto spec = make_default_scenario(ScenarioLabel::time_only);
    const auto res = least_solution(spec, RegularizationSchedule::default_schedule());
    CHECK(res.converged);
    double err = 0.0;
    for (int k = 0; k < spec.grid.nt; ++k)
        for (std::size_t s = 0; s < spec.grid.nodes_per_level(); ++s)
            err = std::max(err, std::abs(res.u.at(k, s) - std::max(spec.grid.t(k), 0.0)));
    CHECK(err < 1e-6);
    const auto r = residual_away_from_interface(res.u, 1e-3);
    CHECK(r.nodes_checked > 0u);
    CHECK(r.max_abs < 1e-8);
}

TEST_CASE("negative constant data is a stationary solution") {
    const Grid g = Grid::make(1, -1.0, 1.0, 21, 0.0, 0.5, 51);
    const auto spec = make_scenario(g, [](const double*, double) { return -1.0; }, 0.0, ScenarioLabel::custom);
    const auto res = least_solution(spec, RegularizationSchedule::default_schedule());
    for (double v : res.u.values()) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
    for (double v : res.chi.values()) CHECK(v == 0.0);
}

TEST_CASE("local_cap: least solution is zero; forced solve converges under refinement") {
    const auto spec = make_default_scenario(ScenarioLabel::local_cap);
    const auto res = least_solution(spec, RegularizationSchedule::default_schedule());
    CHECK(res.u.sup_abs() == 0.0);

    const auto coarse = solve_forced(spec, 1.0);
    CHECK(coarse.sup_abs() > 0.1);
    const Grid& g = spec.grid;
    const Grid fine_g = Grid::make(1, g.a, g.b, 4 * (g.nx - 1) + 1, g.t0, g.t1, 4 * (g.nt - 1) + 1);
    const auto fine = solve_forced(make_local_cap(fine_g), 1.0);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i) err = std::max(err, std::abs(coarse.at(k, i) - fine.at(4 * k, 4 * i)));
    CHECK(err < 1e-2);
    // forced heat solution with zero data is positive inside and bounded by t
    for (int k = 1; k < g.nt; ++k)
        for (int i = 1; i < g.nx - 1; ++i) {
            CHECK(coarse.at(k, i) > 0.0);
            CHECK(coarse.at(k, i) <= g.t(k) + 1e-12);
        }
}

TEST_CASE("comparison: ordered data give ordered regularized solutions") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 0.3);
    const Grid g = Grid::make(1, -1.0, 1.0, 31, 0.0, 0.3, 61);
    for (int trial = 0; trial < 5; ++trial) {
        const double a = U(rng), b = U(rng);
        const auto lo = make_scenario(
            g, [a](const double* x, double t) { return x[0] * x[0] - 0.5 + t - a; }, 0.0, ScenarioLabel::custom);
        const auto hi = make_scenario(
            g, [a, b](const double* x, double t) { return x[0] * x[0] - 0.5 + t - a + b; }, 0.0, ScenarioLabel::custom);
        const auto sched = RegularizationSchedule::default_schedule();
        for (double eps : {0.1, 0.01}) {
            const auto ul = solve_regularized(lo, eps, sched);
            const auto uh = solve_regularized(hi, eps, sched);
            for (std::size_t i = 0; i < ul.values().size(); ++i) CHECK(ul.values()[i] <= uh.values()[i] + 1e-12);
        }
    }
}

TEST_CASE("eps-monotonicity: decreasing eps never decreases the solution") {
    const auto spec = make_default_scenario(ScenarioLabel::collapsing_interval, 101);
    auto sched = RegularizationSchedule::default_schedule();
    sched.stop_tol = 1e-3;
    const auto res = least_solution(spec, sched, true);
    CHECK(res.per_eps_solutions.size() == res.eps_used.size());
    for (double m : res.tail_min_diffs) CHECK(m >= -kEpsMonotoneTol);
    for (std::size_t k = 1; k < res.per_eps_solutions.size(); ++k) {
        const auto& a = res.per_eps_solutions[k - 1].values();
        const auto& b = res.per_eps_solutions[k].values();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] >= a[i] - kEpsMonotoneTol);
    }
}

TEST_CASE("collapsing_interval: time-monotone with c = 1 and the negative set closes") {
    const auto spec = make_default_scenario(ScenarioLabel::collapsing_interval, 101);
    auto sched = RegularizationSchedule::default_schedule();
    sched.stop_tol = 1e-3;
    const auto res = least_solution(spec, sched);
    const auto rep = check_time_monotonicity(res.u, spec.c, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.min_slope >= 1.0 - 1e-6);

    const Grid& g = spec.grid;
    int first_positive = -1;
    for (int k = 0; k < g.nt && first_positive < 0; ++k) {
        bool all_pos = true;
        for (int i = 0; i < g.nx; ++i) all_pos = all_pos && res.u.at(k, i) > 0.0;
        if (all_pos) first_positive = k;
    }
    REQUIRE(first_positive > 0);
    const double tstar = g.t(first_positive);
    CHECK(tstar > 0.1);
    CHECK(tstar < 0.35);
}

TEST_CASE("equation residual vanishes for a closed-form positive solution") {
    // u = 2t + x^2/2 + 1 solves u_t - u'' = 1 and stays positive
    const Grid g = Grid::make(1, -1.0, 1.0, 21, 0.0, 0.5, 21);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return 2.0 * t + 0.5 * x[0] * x[0] + 1.0; });
    const auto r = residual_away_from_interface(u, 1e-6);
    CHECK(r.nodes_checked == static_cast<std::size_t>((g.nt - 1) * (g.nx - 2)));
    CHECK(r.max_abs < 1e-10);
}

TEST_CASE("invalid scenarios are rejected") {
    const Grid g = Grid::make(1, -1.0, 1.0, 11, 0.0, 1.0, 11);
    auto spec = make_local_cap(g);
    spec.lateral[0] = 1.0;
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    CHECK_THROWS_AS(make_scenario(g, [](const double*, double) { return 0.0; }, 1.0, ScenarioLabel::custom),
                    InvalidInput);
    CHECK_THROWS_AS(make_collapsing_interval(Grid::make(2, -1.0, 1.0, 11, 0.0, 1.0, 11)), InvalidInput);
}

TEST_CASE("2D solver agrees with the 1D solver on x1-independent data") {
    const Grid g1 = Grid::make(1, -1.0, 1.0, 17, 0.0, 0.2, 21);
    const Grid g2 = Grid::make(2, -1.0, 1.0, 17, 0.0, 0.2, 21);
    auto psi1 = [](const double*, double t) { return std::max(t - 0.05, 0.0); };
    const auto s1 = make_scenario(g1, psi1, 0.0, ScenarioLabel::custom);
    const auto s2 = make_scenario(g2, psi1, 0.0, ScenarioLabel::custom);
    const auto sched = RegularizationSchedule::default_schedule();
    const auto u1 = solve_regularized(s1, 0.01, sched);
    const auto u2 = solve_regularized(s2, 0.01, sched);
    for (int k = 0; k < g1.nt; ++k)
        for (int i = 0; i < g2.nx; ++i)
            for (int j = 0; j < g2.nx; ++j) CHECK(u2.at(k, g2.flatten(i, j)) == doctest::Approx(u1.at(k, j)).epsilon(1e-8));
}
