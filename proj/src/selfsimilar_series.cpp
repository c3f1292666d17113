#include "ufb/selfsimilar_series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ufb/errors.hpp"

namespace ufb {

namespace {

constexpr double kSqrt2 = kSqrt2D;

using State = std::array<double, 2>;  // (f, f')

State rhs(double x, const State& y) { return {y[1], 0.5 * x * y[1] - y[0] - 1.0}; }

State rk4_step(double x, const State& y, double h) {
    auto axpy = [](const State& a, double s, const State& b) { return State{a[0] + s * b[0], a[1] + s * b[1]}; };
    const State k1 = rhs(x, y);
    const State k2 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = rhs(x + h, axpy(y, h, k3));
    return {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

double initial_slope(double c, SlopeConvention s) { return s == SlopeConvention::literal ? c : kSqrt2 * c; }

std::size_t segment(const OuterProfile& p, double xq) {
    if (p.x.size() < 2 || xq < p.x.front() || xq > p.x.back())
        throw DomainError("outer profile queried outside [" + std::to_string(p.x.front()) + ", " +
                          std::to_string(p.x.back()) + "]");
    const auto it = std::upper_bound(p.x.begin(), p.x.end(), xq);
    return std::min<std::size_t>(std::max<std::ptrdiff_t>(it - p.x.begin(), 1) - 1, p.x.size() - 2);
}

}  // namespace

const char* to_string(SlopeConvention s) { return s == SlopeConvention::literal ? "literal" : "matched"; }

SeriesSolution series_coefficients(double c, int N, SlopeConvention slope) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("series_coefficients: c must be positive");
    if (N < 4) throw ParameterError("series_coefficients: N must be at least 4");
    SeriesSolution s;
    s.c = c;
    s.slope = slope;
    s.N = N;
    auto& a = s.coeffs;
    a.assign(N + 1, 0.0L);
    a[0] = 0.0L;
    a[1] = slope == SlopeConvention::literal ? static_cast<long double>(c) : kSqrt2L * c;
    a[2] = (kSqrt2L / 2 * a[1] - 1.0L) / 2;
    for (int n = 1; n + 2 <= N; ++n)
        a[n + 2] = ((n / 2.0L - 1) * a[n] + kSqrt2L / 2 * (n + 1) * a[n + 1]) / ((n + 2.0L) * (n + 1));

    for (int n = 1; n + 2 <= N; ++n) {
        const long double t1 = (n / 2.0L - 1) * a[n], t2 = kSqrt2L / 2 * (n + 1) * a[n + 1];
        const long double t3 = (n + 2.0L) * (n + 1) * a[n + 2];
        const long double scale = std::fabs(t1) + std::fabs(t2) + std::fabs(t3);
        if (scale > 0) s.recursion_residual = std::max(s.recursion_residual, std::fabs(t1 + t2 - t3) / scale);
    }
    for (int n = 3; n <= N; ++n)
        if (!(a[n] < 0)) {
            s.first_nonnegative = n;
            break;
        }
    return s;
}

SeriesValue evaluate_series(const SeriesSolution& s, double x, double tol) {
    if (!(x >= kSqrt2)) throw ParameterError("evaluate_series: x must be at least sqrt(2)");
    // the double nearest sqrt(2) stands for the expansion point itself
    const long double y = x == kSqrt2 ? 0.0L : static_cast<long double>(x) - kSqrt2L;
    long double acc = 0;
    for (int n = s.N; n >= 0; --n) acc = acc * y + s.coeffs[n];
    const int n = s.N - 1;
    const long double next = ((n / 2.0L - 1) * s.coeffs[n] + kSqrt2L / 2 * (n + 1) * s.coeffs[n + 1]) /
                             ((n + 2.0L) * (n + 1));
    SeriesValue v;
    v.value = static_cast<double>(acc);
    v.error = static_cast<double>(10 * std::fabs(next * std::pow(y, static_cast<long double>(s.N + 1))));
    v.flagged = !(v.error <= tol);
    return v;
}

double OuterProfile::value(double xq) const {
    const std::size_t i = segment(*this, xq);
    const double hh = x[i + 1] - x[i], s = (xq - x[i]) / hh;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * f[i] + h10 * hh * df[i] + h01 * f[i + 1] + h11 * hh * df[i + 1];
}

double OuterProfile::derivative(double xq) const {
    const std::size_t i = segment(*this, xq);
    const double hh = x[i + 1] - x[i], s = (xq - x[i]) / hh;
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -d00, d11 = 3 * s * s - 2 * s;
    return (d00 * f[i] + d01 * f[i + 1]) / hh + d10 * df[i] + d11 * df[i + 1];
}

OuterProfile ode_integrate(double c, double x_max, double h, SlopeConvention slope) {
    if (!(h > 0.0) || h > 1e-3) throw ParameterError("ode_integrate: step must lie in (0, 1e-3]");
    if (!(x_max > kSqrt2)) throw ParameterError("ode_integrate: x_max must exceed sqrt(2)");
    if (!(c > 0.0)) throw ParameterError("ode_integrate: c must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil((x_max - kSqrt2) / h));
    const double hs = (x_max - kSqrt2) / static_cast<double>(steps);
    OuterProfile p;
    p.c = c;
    p.slope = slope;
    p.h = hs;
    p.x.reserve(steps + 1);
    p.f.reserve(steps + 1);
    p.df.reserve(steps + 1);
    State y{0.0, initial_slope(c, slope)};
    p.x.push_back(kSqrt2);
    p.f.push_back(y[0]);
    p.df.push_back(y[1]);
    for (std::size_t k = 1; k <= steps; ++k) {
        y = rk4_step(kSqrt2 + static_cast<double>(k - 1) * hs, y, hs);
        if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
            std::ostringstream os;
            os << "ode_integrate: overflow, last finite x = " << p.x.back();
            throw NumericError(os.str(), p.x.back());
        }
        p.x.push_back(k == steps ? x_max : kSqrt2 + static_cast<double>(k) * hs);
        p.f.push_back(y[0]);
        p.df.push_back(y[1]);
    }
    return p;
}

NegativityResult negativity_finder(double c, double x_max, SlopeConvention slope, double h) {
    const OuterProfile p = ode_integrate(c, x_max, h, slope);
    NegativityResult r;
    std::size_t k = 1;
    while (k < p.f.size() && p.f[k] >= 0.0) {
        r.f_max = std::max(r.f_max, p.f[k]);
        ++k;
    }
    if (k == p.f.size()) {
        r.verdict = "not found below X_max";
        return r;
    }
    // bisection with single RK4 steps from the left sample
    const State left{p.f[k - 1], p.df[k - 1]};
    double lo = p.x[k - 1], hi = p.x[k];
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        (rk4_step(p.x[k - 1], left, mid - p.x[k - 1])[0] >= 0.0 ? lo : hi) = mid;
    }
    r.x_zero = 0.5 * (lo + hi);
    const bool stays = std::all_of(p.f.begin() + static_cast<std::ptrdiff_t>(k), p.f.end(),
                                   [](double v) { return v < 0.0; });
    r.confirmed = stays;
    std::ostringstream os;
    os << std::setprecision(10);
    if (stays)
        os << "negativity confirmed at x_zero = " << r.x_zero;
    else
        os << "sign change at " << r.x_zero << " but f returns to >= 0 below X_max";
    r.verdict = os.str();
    return r;
}

ConvergenceWindow convergence_window(const SeriesSolution& s, const OuterProfile& p, double tol) {
    ConvergenceWindow w;
    w.x_hi = p.x.front();
    for (std::size_t k = 0; k < p.x.size(); ++k) {
        const SeriesValue v = evaluate_series(s, p.x[k], tol);
        const double d = std::abs(v.value - p.f[k]);
        if (v.flagged || !(d <= tol)) break;
        w.x_hi = p.x[k];
        w.max_diff = std::max(w.max_diff, d);
        ++w.samples;
    }
    return w;
}

double ProfilePair::value(double x) const {
    const double a = std::abs(x);
    if (a <= kSqrt2) return inner(a);
    if (a <= window.x_hi) return evaluate_series(series, a).value;
    return outer.value(a);
}

double ProfilePair::u(double x, double t) const {
    if (!(t < 0.0)) throw ParameterError("ProfilePair::u: needs t < 0");
    const double s = std::sqrt(-t);
    return -t * value(x / s);
}

ProfilePair make_profile_pair(double c, double x_max, SlopeConvention slope, int N, double h) {
    ProfilePair p;
    p.series = series_coefficients(c, N, slope);
    p.outer = ode_integrate(c, x_max, h, slope);
    p.window = convergence_window(p.series, p.outer);
    return p;
}

ReconstructionReport reconstruction_check(const ProfilePair& p, const Grid& g, double band) {
    if (g.dim != 1) throw InvalidInput("reconstruction_check: 1D grids only");
    if (!(g.t1 < 0.0)) throw InvalidInput("reconstruction_check: grid must lie in t < 0");
    const auto u = SpaceTimeField::sample(g, [&](const double* x, double t) { return p.u(x[0], t); });
    ReconstructionReport rep;
    const double hx = g.hx(), ht = g.ht();
    for (int k = 1; k + 1 < g.nt; ++k) {
        const double t = g.t(k), front = std::sqrt(-2.0 * t);
        for (int i = 1; i + 1 < g.nx; ++i) {
            const double ax = std::abs(g.x(i));
            const double ut = (u.at(k + 1, i) - u.at(k - 1, i)) / (2 * ht);
            const double uxx = (u.at(k, i + 1) - 2 * u.at(k, i) + u.at(k, i - 1)) / (hx * hx);
            if (ax < front - band) {
                rep.residual_inner = std::max(rep.residual_inner, std::abs(ut - uxx));
                ++rep.nodes_inner;
            } else if (ax > front + band) {
                rep.residual_outer = std::max(rep.residual_outer, std::abs(ut - uxx - 1.0));
                ++rep.nodes_outer;
            }
        }
    }
    for (double r : {0.5, 2.0})
        for (int k = 0; k < g.nt; ++k)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), t = g.t(k);
                rep.homogeneity_defect =
                    std::max(rep.homogeneity_defect, std::abs(p.u(r * x, r * r * t) - r * r * p.u(x, t)));
            }
    return rep;
}

void write_coefficients_csv(std::ostream& os, const SeriesSolution& s) {
    os << "n,a_n\n" << std::setprecision(21);
    for (int n = 0; n <= s.N; ++n) os << n << ',' << s.coeffs[n] << '\n';
}

void write_profile_csv(std::ostream& os, const ProfilePair& p, double dx) {
    if (!(dx > 0.0)) throw ParameterError("write_profile_csv: dx must be positive");
    os << "x,f,source\n" << std::setprecision(17);
    const double xm = p.outer.x_max();
    const auto n = static_cast<std::size_t>(std::floor(xm / dx + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = std::min(static_cast<double>(k) * dx, xm);
        const char* src = x <= kSqrt2 ? "inner" : (x <= p.window.x_hi ? "series" : "ode");
        os << x << ',' << p.value(x) << ',' << src << '\n';
    }
}

}  // namespace ufb
