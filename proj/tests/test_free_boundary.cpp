#include <cmath>
#include <sstream>

#include "doctest.h"
#include "ufb/free_boundary.hpp"
#include "ufb/regularized_solver.hpp"

using namespace ufb;

namespace {

SpaceTimeField tent(int nx = 81, int nt = 121) {
    const Grid g = Grid::make(1, -1.0, 1.0, nx, -0.2, 1.3, nt);
    return SpaceTimeField::sample(g, [](const double* x, double t) { return t - std::abs(x[0]); });
}

}  // namespace

TEST_CASE("graph of max{t,0} is H = 0") {
    const Grid g = Grid::make(1, -1.0, 1.0, 21, -0.5, 0.5, 41);
    const auto u = SpaceTimeField::sample(g, [](const double*, double t) { return std::max(t, 0.0); });
    const auto fb = extract_graph(u);
    CHECK(fb.valid_count() == 21u);
    for (double h : fb.H) CHECK(h == doctest::Approx(0.0).epsilon(1e-14));
    const auto lr = lipschitz_report(fb, u, 1.0);
    CHECK(lr.lip == 0.0);
    CHECK(lr.pass);
}

TEST_CASE("graph of t - |x| is |x| with Lipschitz constant 1 at the bound") {
    const auto u = tent();
    const auto fb = extract_graph(u);
    const Grid& g = u.grid();
    CHECK(fb.valid_count() == static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i) {
        CHECK(fb.H[i] == doctest::Approx(std::abs(g.x(i))).epsilon(1e-12));
        if (std::abs(g.x(i)) > 1.5 * g.hx())
            CHECK(fb.gradH[i][0] == doctest::Approx(g.x(i) > 0 ? 1.0 : -1.0).epsilon(1e-12));
    }
    const auto lr = lipschitz_report(fb, u, 1.0);
    CHECK(lr.lip == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lr.grad_sup == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lr.pass);
}

TEST_CASE("a column that crosses twice is an error; no crossing gives an empty graph") {
    const Grid g = Grid::make(1, -1.0, 1.0, 11, 0.0, 1.0, 11);
    const auto wave = SpaceTimeField::sample(g, [](const double*, double t) { return std::sin(12.0 * t) - 0.1; });
    CHECK_THROWS_AS(extract_graph(wave), InvalidInput);
    const auto neg = SpaceTimeField(g, -1.0);
    CHECK(extract_graph(neg).empty());
    CHECK_THROWS_AS(lipschitz_report(extract_graph(neg), neg, 1.0), InvalidInput);
}

TEST_CASE("Gauss map normals are unit and consistent with theta") {
    const auto u = tent();
    const auto fb = extract_graph(u);
    const auto nf = normal_field(fb, u);
    REQUIRE(nf.size() > 10u);
    for (std::size_t i = 0; i < nf.size(); ++i) {
        const auto& n = nf.nu[i];
        CHECK(std::abs(std::hypot(n[0], n[1]) - 1.0) < 1e-12);
        CHECK(std::abs(nf.theta[i] - std::atan2(nf.grad_norm[i], nf.ut_plus[i])) < 1e-10);
        CHECK(nf.theta[i] >= 0.0);
        CHECK(nf.theta[i] < M_PI / 2);
    }
    const auto rep = normal_holder_report(nf, 0.5, 1.0);
    CHECK(rep.unit_defect < 1e-12);
    CHECK(rep.cone_pass);
}

TEST_CASE("constant normal has zero seminorm") {
    const Grid g = Grid::make(1, -1.0, 1.0, 41, -1.0, 1.5, 101);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return t - 0.3 * x[0]; });
    const auto nf = normal_field(extract_graph(u), u);
    const auto rep = normal_holder_report(nf, 0.5, 1.0);
    CHECK(rep.seminorm < 1e-10);
    CHECK(rep.cone_pass);
    CHECK(rep.cone_excess <= 1e-12);
}

TEST_CASE("cone bound is violated when u_t is below c") {
    const Grid g = Grid::make(1, -1.0, 1.0, 41, -1.0, 1.5, 101);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return 0.5 * t - 0.3 * x[0]; });
    const auto nf = normal_field(extract_graph(u), u);
    CHECK_FALSE(normal_holder_report(nf, 0.5, 1.0).cone_pass);
}

TEST_CASE("pinching: parabola passes with exponent 2, tent is inconclusive") {
    const Grid g = Grid::make(1, -1.0, 1.0, 201, -0.1, 0.7, 161);
    const auto par = SpaceTimeField::sample(g, [](const double* x, double t) { return t - 0.5 * x[0] * x[0]; });
    const auto fb = extract_graph(par);
    const auto rep = pinching_check(fb, par, 100, 0.5);
    CHECK(rep.status == PinchingStatus::pass);
    CHECK(rep.exponent == doctest::Approx(2.0).epsilon(0.02));
    CHECK(rep.rhos.size() >= 3u);

    const auto t = tent(201, 161);
    const auto rt = pinching_check(extract_graph(t), t, 100, 0.5);
    CHECK(rt.status == PinchingStatus::inconclusive);
}

TEST_CASE("pinching: a graph flatter than 1 + alpha fails") {
    // H(x) = |x|^{1.2}: critical at 0 but the exponent is too small for alpha = 0.5
    const Grid g = Grid::make(1, -1.0, 1.0, 401, -0.1, 1.1, 601);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return t - std::pow(std::abs(x[0]), 1.2); });
    const auto rep = pinching_check(extract_graph(u), u, 200, 0.5);
    CHECK(rep.status != PinchingStatus::pass);
}

TEST_CASE("H converges at first order under refinement on an exact solution") {
    auto herr = [](int nx) {
        const Grid g = Grid::make(1, -1.0, 1.0, nx, 0.0, 1.0, nx);
        const auto u = SpaceTimeField::sample(g, [](const double* x, double t) {
            return t * t + t - 0.5 * (x[0] * x[0] + 0.2);
        });
        const auto fb = extract_graph(u);
        double e = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double q = 0.5 * (g.x(i) * g.x(i) + 0.2);
            const double exact = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * q));
            e = std::max(e, std::abs(fb.H[i] - exact));
        }
        return e;
    };
    const double e1 = herr(41), e2 = herr(81);
    CHECK(e2 < e1);
    CHECK(e2 < 2.0 / 80.0);
}

TEST_CASE("boundary CSV has one row per normal sample") {
    const auto u = tent(21, 41);
    const auto fb = extract_graph(u);
    const auto nf = normal_field(fb, u);
    std::ostringstream os;
    write_boundary_csv(os, fb, nf);
    const std::string s = os.str();
    CHECK(s.rfind("x,H,dHdx,grad_norm,ut_plus,theta\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(nf.size() + 1));
}

TEST_CASE("collapsing interval: graph top matches the solver's collapse time") {
    const auto spec = make_default_scenario(ScenarioLabel::collapsing_interval, 101);
    auto sched = RegularizationSchedule::default_schedule();
    sched.stop_tol = 1e-3;
    const auto res = least_solution(spec, sched);
    const auto fb = extract_graph(res.u);
    REQUIRE_FALSE(fb.empty());
    const Grid& g = spec.grid;
    double hmax = 0.0;
    for (std::size_t s = 0; s < fb.H.size(); ++s)
        if (fb.valid[s]) hmax = std::max(hmax, fb.H[s]);
    int last_negative = -1;
    for (int k = 0; k < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            if (res.u.at(k, i) <= 0.0) last_negative = k;
    CHECK(hmax >= g.t(last_negative) - 1e-12);
    CHECK(hmax <= g.t(last_negative + 1) + 1e-12);
    const auto lr = lipschitz_report(fb, res.u, 1.0);
    CHECK(lr.pass);
}
