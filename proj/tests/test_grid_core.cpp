#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ufb/cylinder.hpp"
#include "ufb/field_io.hpp"
#include "ufb/finite_difference.hpp"
#include "ufb/holder.hpp"

using namespace ufb;

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS_AS(Grid::make(1, 0.0, 1.0, 2, 0.0, 1.0, 5), InvalidInput);
    CHECK_THROWS_AS(Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 2), InvalidInput);
    CHECK_THROWS_AS(Grid::make(3, 0.0, 1.0, 5, 0.0, 1.0, 5), InvalidInput);
    CHECK_THROWS_AS(Grid::make(1, 1.0, 1.0, 5, 0.0, 1.0, 5), InvalidInput);
    const Grid g = Grid::make(2, -1.0, 1.0, 5, 0.0, 2.0, 9);
    CHECK(g.hx() == doctest::Approx(0.5));
    CHECK(g.ht() == doctest::Approx(0.25));
    CHECK(g.parabolic_ratio() == doctest::Approx(1.0));
    CHECK(g.size() == 25u * 9u);
    CHECK(g.boundary_nodes().size() == 16u);
}

TEST_CASE("finite differences are exact on x^2 and t") {
    const Grid g = Grid::make(1, -1.0, 1.0, 11, 0.0, 1.0, 7);
    const auto sq = SpaceTimeField::sample(g, [](const double* x, double) { return x[0] * x[0]; });
    const auto b = finite_differences(sq);
    for (int k = 0; k < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i) {
            CHECK(b.hess[0].at(k, i) == doctest::Approx(2.0).epsilon(1e-12));
            CHECK(b.grad[0].at(k, i) == doctest::Approx(2.0 * g.x(i)).epsilon(1e-12));
        }

    const auto lin = SpaceTimeField::sample(g, [](const double*, double t) { return t; });
    const auto bt = finite_differences(lin);
    for (double v : bt.ut.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : bt.grad[0].values()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("finite differences are exact on 2D quadratics including the mixed term") {
    const Grid g = Grid::make(2, -1.0, 1.0, 9, 0.0, 1.0, 3);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) {
        return 3.0 * x[0] * x[0] - x[0] * x[1] + 0.5 * x[1] * x[1] + 2.0 * t;
    });
    const auto b = finite_differences(u);
    double xs[2];
    for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
        g.coords(s, xs);
        CHECK(b.grad[0].at(1, s) == doctest::Approx(6.0 * xs[0] - xs[1]).epsilon(1e-12));
        CHECK(b.grad[1].at(1, s) == doctest::Approx(-xs[0] + xs[1]).epsilon(1e-12));
        CHECK(b.hessian(0, 0, 2).at(1, s) == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(b.hessian(0, 1, 2).at(1, s) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(b.hessian(1, 0, 2).at(1, s) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(b.hessian(1, 1, 2).at(1, s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.ut.at(1, s) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("gradient of sin(x) e^-t converges at second order against the closed form") {
    const Grid g = Grid::make(1, -1.0, 1.0, 101, 0.0, 1.0, 101);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return std::sin(x[0]) * std::exp(-t); });
    const auto b = finite_differences(u);
    double err = 0.0;
    for (int k = 0; k < g.nt; ++k)
        for (int i = 1; i < g.nx - 1; ++i)
            err = std::max(err, std::abs(b.grad[0].at(k, i) - std::cos(g.x(i)) * std::exp(-g.t(k))));
    // central-difference truncation error is h^2/6 |u'''| <= h^2/6
    const double h = g.hx();
    CHECK(err <= h * h / 6.0 * 1.0001);
    CHECK(err > h * h / 60.0);
}

TEST_CASE("finite differences are linear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid g = Grid::make(2, 0.0, 1.0, 7, 0.0, 1.0, 5);
    SpaceTimeField u(g), v(g), w(g);
    const double a = 1.7, c = -0.3;
    for (std::size_t i = 0; i < g.size(); ++i) {
        u.values()[i] = U(rng);
        v.values()[i] = U(rng);
        w.values()[i] = a * u.values()[i] + c * v.values()[i];
    }
    const auto bu = finite_differences(u), bv = finite_differences(v), bw = finite_differences(w);
    auto check = [&](const SpaceTimeField& fu, const SpaceTimeField& fv, const SpaceTimeField& fw) {
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(fw.values()[i] - (a * fu.values()[i] + c * fv.values()[i])) < 1e-9);
    };
    check(bu.ut, bv.ut, bw.ut);
    for (int i = 0; i < 2; ++i) check(bu.grad[i], bv.grad[i], bw.grad[i]);
    for (int i = 0; i < 4; ++i) check(bu.hess[i], bv.hess[i], bw.hess[i]);
}

TEST_CASE("finite differences reject non-finite input") {
    const Grid g = Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 5);
    SpaceTimeField u(g);
    u.at(2, 2) = std::nan("");
    CHECK_THROWS_AS(finite_differences(u), InvalidInput);
}

TEST_CASE("restrict: unbounded, empty and brute-force counts") {
    const Grid g = Grid::make(1, -1.0, 1.0, 41, -1.0, 1.0, 41);
    ParabolicCylinder all{{0.3, 0.0}, 0.1, std::numeric_limits<double>::infinity()};
    CHECK(restrict(g, all).size() == g.size());

    ParabolicCylinder tiny{{0.0125, 0.0}, 0.0125, 0.001};
    const auto none = restrict(g, tiny);
    CHECK(none.size() == 0u);
    CHECK(none.empty_flagged);

    ParabolicCylinder q{{0.0, 0.0}, 0.0, 0.5};
    std::size_t brute = 0;
    for (int k = 0; k < g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(g.x(i)) + std::sqrt(std::abs(g.t(k))) < 0.5) ++brute;
    CHECK(restrict(g, q).size() == brute);
    CHECK(brute > 0u);

    ParabolicCylinder at_node{{0.0, 0.0}, 0.0, std::max(g.hx(), std::sqrt(g.ht()))};
    CHECK(restrict(g, at_node).size() > 0u);
}

TEST_CASE("cylinder membership agrees with the defining formula on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int n = 0; n < 10000; ++n) {
        ParabolicCylinder q{{U(rng), U(rng)}, U(rng), std::abs(U(rng))};
        const double y[2] = {U(rng), U(rng)};
        const double s = U(rng);
        const double direct =
            std::hypot(y[0] - q.center[0], y[1] - q.center[1]) + std::pow(std::abs(s - q.t), 0.5);
        CHECK((q.contains(y, s, 2) == (direct < q.r)));
    }
}

TEST_CASE("holder norm of a constant is the sup") {
    const Grid g = Grid::make(1, 0.0, 1.0, 9, 0.0, 1.0, 9);
    const SpaceTimeField u(g, 7.0);
    const ParabolicCylinder q{{0.5, 0.0}, 0.5, 0.8};
    for (auto mode : {HolderMode::isotropic, HolderMode::parabolic}) {
        const auto h = discrete_holder_norm(u, 0.5, q, mode);
        CHECK(h.norm == 7.0);
        CHECK(h.seminorm == 0.0);
    }
}

TEST_CASE("isotropic holder seminorm of u = x matches exhaustive enumeration on 5x5") {
    const Grid g = Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 5);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double) { return x[0]; });
    const ParabolicCylinder all{{0.5, 0.0}, 0.5, std::numeric_limits<double>::infinity()};
    const auto h = discrete_holder_norm(u, 0.5, all, HolderMode::isotropic);

    double oracle = 0.0;
    for (int k1 = 0; k1 < 5; ++k1)
        for (int i1 = 0; i1 < 5; ++i1)
            for (int k2 = 0; k2 < 5; ++k2)
                for (int i2 = 0; i2 < 5; ++i2) {
                    if (k1 == k2 && i1 == i2) continue;
                    const double dx = g.x(i1) - g.x(i2), dt = g.t(k1) - g.t(k2);
                    oracle = std::max(oracle, std::abs(dx) / std::pow(dx * dx + dt * dt, 0.25));
                }
    CHECK(h.seminorm == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(h.seminorm == doctest::Approx(1.0).epsilon(1e-14));  // farthest same-time pair, |x-y|^{1/2} = 1
    CHECK(h.sup == 1.0);
    CHECK(h.exhaustive);
    CHECK(h.pairs == 25u * 24u / 2u);
}

TEST_CASE("parabolic seminorm of u = t with alpha = 1 is the square root of the time width") {
    const Grid g = Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 17);
    const auto u = SpaceTimeField::sample(g, [](const double*, double t) { return t; });
    const ParabolicCylinder all{{0.5, 0.0}, 0.5, std::numeric_limits<double>::infinity()};
    const auto h = discrete_holder_norm(u, 1.0, all, HolderMode::parabolic);
    CHECK(h.seminorm == doctest::Approx(1.0).epsilon(1e-14));

    const ParabolicCylinder sub{{0.5, 0.0}, 0.5, 0.6};  // time window |t - 0.5| < 0.36
    const auto rn = restrict(g, sub);
    double tmin = 1e9, tmax = -1e9;
    for (auto n : rn.nodes) {
        tmin = std::min(tmin, g.t(n.k));
        tmax = std::max(tmax, g.t(n.k));
    }
    CHECK(discrete_holder_norm(u, 1.0, sub, HolderMode::parabolic).seminorm ==
          doctest::Approx(std::sqrt(tmax - tmin)).epsilon(1e-14));
}

TEST_CASE("parabolic and parabolic-distance seminorms agree within a factor 2") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid g = Grid::make(1, 0.0, 1.0, 9, 0.0, 1.0, 9);
    const ParabolicCylinder all{{0.5, 0.0}, 0.5, std::numeric_limits<double>::infinity()};
    for (int trial = 0; trial < 20; ++trial) {
        SpaceTimeField u(g);
        for (double& v : u.values()) v = U(rng);
        for (double alpha : {0.25, 0.5, 0.9}) {
            const double p = discrete_holder_norm(u, alpha, all, HolderMode::parabolic).seminorm;
            const double d = discrete_holder_norm(u, alpha, all, HolderMode::parabolic_distance).seminorm;
            // (x+y)^a <= x^a + y^a <= 2 (x+y)^a
            CHECK(p <= d * (1 + 1e-12));
            CHECK(d <= 2.0 * p * (1 + 1e-12));
        }
    }
}

TEST_CASE("large regions switch to the deterministic pair sample") {
    const Grid g = Grid::make(1, 0.0, 1.0, 201, 0.0, 1.0, 201);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return x[0] + t; });
    const ParabolicCylinder all{{0.5, 0.0}, 0.5, std::numeric_limits<double>::infinity()};
    const auto a = discrete_holder_norm(u, 0.5, all, HolderMode::parabolic);
    const auto b = discrete_holder_norm(u, 0.5, all, HolderMode::parabolic);
    CHECK_FALSE(a.exhaustive);
    CHECK(a.seminorm == b.seminorm);
    CHECK(a.seminorm > 0.0);
}

TEST_CASE("holder norm rejects regions with fewer than two nodes") {
    const Grid g = Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 5);
    const SpaceTimeField u(g, 1.0);
    const ParabolicCylinder tiny{{0.1, 0.0}, 0.1, 1e-3};
    CHECK_THROWS_AS(discrete_holder_norm(u, 0.5, tiny, HolderMode::isotropic), InvalidInput);
}

TEST_CASE("binary container round-trips bit for bit; CSV has one row per node") {
    const Grid g = Grid::make(2, -1.0, 1.0, 3, 0.0, 0.5, 3);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return std::exp(x[0]) * x[1] - t / 3.0; });
    std::stringstream ss;
    write_field(ss, u);
    CHECK(ss.str().size() == kFieldHeaderBytes + g.size() * sizeof(double));
    CHECK(ss.str().substr(0, 4) == "UFBF");
    const auto back = read_field(ss);
    CHECK(back.grid().same_shape(g));
    CHECK(std::memcmp(back.values().data(), u.values().data(), u.values().size_bytes()) == 0);

    std::ostringstream csv;
    write_field_csv(csv, u);
    const std::string text = csv.str();
    CHECK(text.rfind("t,x1,x2,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(g.size() + 1));

    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(read_field(bad), InvalidInput);
}

TEST_CASE("multilinear interpolation reproduces bilinear data and guards the domain") {
    const Grid g = Grid::make(1, 0.0, 1.0, 5, 0.0, 1.0, 5);
    const auto u = SpaceTimeField::sample(g, [](const double* x, double t) { return 2.0 * x[0] + 3.0 * t + x[0] * t; });
    const double x[1] = {0.33};
    CHECK(u.interpolate(x, 0.71) == doctest::Approx(2 * 0.33 + 3 * 0.71 + 0.33 * 0.71).epsilon(1e-13));
    const double out[1] = {1.5};
    CHECK_THROWS_AS(u.interpolate(out, 0.5), DomainError);
}
