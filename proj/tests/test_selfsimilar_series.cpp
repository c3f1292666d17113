#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ufb/selfsimilar_series.hpp"

using namespace ufb;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("series anchors a_0..a_4") {
    for (double c : {0.1, 1.0, 10.0}) {
        const auto s = series_coefficients(c, 10);
        CHECK(s.coeffs[0] == 0.0L);
        CHECK(static_cast<double>(s.coeffs[1]) == c);
        CHECK(std::abs(static_cast<double>(s.coeffs[2]) - (kSqrt2 / 4 * c - 0.5)) < 1e-15);
        CHECK(std::abs(static_cast<double>(s.coeffs[3]) + kSqrt2 / 12) < 1e-12);
        CHECK(std::abs(static_cast<double>(s.coeffs[4]) + 1.0 / 48) < 1e-12);
    }
    CHECK(static_cast<double>(series_coefficients(1.0, 4).coeffs[2]) == doctest::Approx(-0.1464466094));
    CHECK_THROWS_AS(series_coefficients(0.0, 10), ParameterError);
    CHECK_THROWS_AS(series_coefficients(1.0, 3), ParameterError);
}

TEST_CASE("a_3 does not depend on c or on the slope convention") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.01, 50.0);
    long double lo = 1, hi = -1;
    for (int i = 0; i < 10; ++i)
        for (auto sl : {SlopeConvention::literal, SlopeConvention::matched}) {
            const long double a3 = series_coefficients(U(rng), 5, sl).coeffs[3];
            lo = std::min(lo, a3);
            hi = std::max(hi, a3);
        }
    CHECK(static_cast<double>(hi - lo) < 1e-14);
}

TEST_CASE("a_n < 0 for 3 <= n <= 200 and the recursion residual is round-off") {
    for (double c : {0.1, 1.0, 10.0})
        for (auto sl : {SlopeConvention::literal, SlopeConvention::matched}) {
            const auto s = series_coefficients(c, 200, sl);
            CHECK(s.signs_ok());
            CHECK(s.recursion_residual < 1e-17L);
            // sign propagation: n >= 2 and two consecutive negatives give a negative
            for (int n = 2; n + 2 <= 200; ++n)
                if (s.coeffs[n] < 0 && s.coeffs[n + 1] < 0) CHECK(s.coeffs[n + 2] < 0);
        }
}

TEST_CASE("inner profile solves the homogeneous equation") {
    for (double c : {0.1, 1.0, 10.0})
        for (double x : {0.0, 0.3, 1.0, 1.4}) {
            const double f = c * (-1 + 0.5 * x * x), df = c * x, d2f = c;
            CHECK(std::abs(-d2f + 0.5 * x * df - f) < 1e-14 * (1 + c));
        }
}

TEST_CASE("ODE start matches the series and the two agree near sqrt 2") {
    for (double c : {0.1, 1.0, 10.0}) {
        const auto p = ode_integrate(c, kSqrt2 + 0.5, 1e-3);
        const auto s = series_coefficients(c, 200);
        // f''(sqrt2) from the ODE equals 2 a_2
        const double d2 = 0.5 * kSqrt2 * p.df[0] - p.f[0] - 1.0;
        CHECK(d2 == doctest::Approx(2.0 * static_cast<double>(s.coeffs[2])));
        for (std::size_t k = 0; k < p.x.size(); ++k) CHECK(std::abs(evaluate_series(s, p.x[k]).value - p.f[k]) < 1e-6);
    }
    const auto p = ode_integrate(1.0, kSqrt2 + 0.2, 1e-3);
    const auto s = series_coefficients(1.0, 200);
    CHECK(std::abs(evaluate_series(s, kSqrt2 + 0.1).value - p.value(kSqrt2 + 0.1)) < 1e-8);
    CHECK(evaluate_series(s, kSqrt2).value == 0.0);
    CHECK_THROWS_AS(evaluate_series(s, 1.0), ParameterError);
    CHECK_THROWS_AS(ode_integrate(1.0, 3.0, 2e-3), ParameterError);
    CHECK_THROWS_AS(p.value(5.0), DomainError);
}

TEST_CASE("series error estimate flags far evaluations") {
    const auto s = series_coefficients(1.0, 8);
    CHECK_FALSE(evaluate_series(s, kSqrt2 + 0.01).flagged);
    CHECK(evaluate_series(s, kSqrt2 + 3.0).flagged);
}

TEST_CASE("eventual negativity for c in {0.1, 1, 10}") {
    for (double c : {0.1, 1.0, 10.0})
        for (auto sl : {SlopeConvention::literal, SlopeConvention::matched}) {
            const auto r = negativity_finder(c, 20.0, sl);
            CHECK(r.confirmed);
            CHECK(r.x_zero > kSqrt2);
            CHECK(r.x_zero < 20.0);
            CHECK(r.verdict.rfind("negativity confirmed", 0) == 0);
            // the located zero is a zero of the integrated profile
            const auto p = ode_integrate(c, 20.0, 1e-3, sl);
            CHECK(std::abs(p.value(r.x_zero)) < 1e-6 * (1 + r.f_max));
        }
}

TEST_CASE("convergence window covers the matching interval") {
    const auto pp = make_profile_pair(1.0, 20.0);
    CHECK(pp.window.x_hi >= kSqrt2 + 0.5);
    CHECK(pp.window.max_diff <= 1e-6);
    CHECK(pp.value(kSqrt2) == 0.0);
    CHECK(pp.value(-1.0) == pp.value(1.0));
    CHECK(pp.inner(kSqrt2) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("self-similar reconstruction: piecewise residual and homogeneity") {
    const auto pp = make_profile_pair(1.0, 12.0, SlopeConvention::matched);
    double prev_in = 0, prev_out = 0;
    for (int n : {201, 401}) {
        const Grid g = Grid::make(1, -2.0, 2.0, n, -1.0, -0.5, n);
        const auto rep = reconstruction_check(pp, g, 0.1);
        CHECK(rep.nodes_inner > 0u);
        CHECK(rep.nodes_outer > 0u);
        CHECK(rep.homogeneity_defect < 1e-12);
        if (prev_in > 0) {
            CHECK(rep.residual_inner < 1e-10);  // quadratic in x and linear in t
            CHECK(rep.residual_outer < 0.3 * prev_out);
        }
        prev_in = rep.residual_inner + 1e-300;
        prev_out = rep.residual_outer;
    }
    CHECK(prev_out < 1e-4);
}

TEST_CASE("coefficient and profile CSV") {
    const auto pp = make_profile_pair(1.0, 3.0);
    std::ostringstream a, b;
    write_coefficients_csv(a, pp.series);
    write_profile_csv(b, pp, 0.5);
    std::istringstream ia(a.str()), ib(b.str());
    std::string line;
    int rows = 0;
    while (std::getline(ia, line)) ++rows;
    CHECK(rows == pp.series.N + 2);
    rows = 0;
    while (std::getline(ib, line)) ++rows;
    CHECK(rows == 1 + 7);  // 0, 0.5, ..., 3.0
}
