#include "ufb/weiss_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

#include "ufb/cylinder.hpp"
#include "ufb/finite_difference.hpp"
#include "ufb/fit.hpp"

namespace ufb {

namespace {

// Pointwise data handed to an integrand.
struct Sample {
    double u, ut;
    double grad[2];
    double x[2];  // relative to the origin
    double t;     // relative to the origin, < 0
    int dim;
};

using Integrand = std::function<double(const Sample&)>;

struct StripResult {
    double integral = 0.0;
    double mass_min = std::numeric_limits<double>::infinity();
    bool truncated = false;
};

// Integral of f * G over the strip (origin.t - 4r^2, origin.t - r^2) x {|x| <= R_cut}.
StripResult strip_integral(const SpaceTimeField& u, const SpaceTimePoint& o, double r, const WeissOptions& opt,
                           int stride, const Integrand& f) {
    const Grid& g = u.grid();
    const int dim = g.dim;
    const double ta = o.t - 4.0 * r * r, tb = o.t - r * r;
    if (ta < g.t0 - 1e-12 * (g.t1 - g.t0) || tb > g.t1) throw DomainError("weiss: strip T_r leaves the time range");
    if (r * r < 4.0 * g.ht()) throw ParameterError("weiss: r^2 below 4 ht is not resolved");
    const double rcut = opt.rcut_factor * std::sqrt(4.0 * r * r);

    // Spatial window per axis, aligned to the stride.
    int lo[2] = {0, 0}, hi[2] = {0, 0};
    StripResult out;
    for (int i = 0; i < dim; ++i) {
        const double xa = o.x[i] - rcut, xb = o.x[i] + rcut;
        if (xa < g.a || xb > g.b) out.truncated = true;
        lo[i] = std::max(0, static_cast<int>(std::ceil((xa - g.a) / g.hx() - 1e-9)));
        hi[i] = std::min(g.nx - 1, static_cast<int>(std::floor((xb - g.a) / g.hx() + 1e-9)));
        lo[i] = ((lo[i] + stride - 1) / stride) * stride;
        hi[i] = (hi[i] / stride) * stride;
        if (hi[i] <= lo[i]) throw DomainError("weiss: spatial window holds fewer than two nodes");
    }
    if (dim == 1) lo[1] = hi[1] = 0;
    const double hs = g.hx() * stride;
    auto weight = [&](int i, int axis) { return (i == lo[axis] || i == hi[axis]) ? 0.5 * hs : hs; };

    int ka = static_cast<int>(std::floor((ta - g.t0) / g.ht() + 1e-9));
    int kb = static_cast<int>(std::ceil((tb - g.t0) / g.ht() - 1e-9));
    ka = std::max(0, (ka / stride) * stride);
    kb = ((kb + stride - 1) / stride) * stride;
    if (kb > g.nt - 1) kb -= stride;
    if (g.t(kb) < tb - 1e-12) throw DomainError("weiss: strip end not bracketed by the strided levels");

    std::vector<double> ts, Fs;
    std::vector<double> gx(g.nodes_per_level()), gy(dim == 2 ? g.nodes_per_level() : 0);
    for (int k = ka; k <= kb; k += stride) {
        const double trel = g.t(k) - o.t;
        if (!(trel < 0.0)) throw DomainError("weiss: strip level at or after the origin time");
        diff_axis(g, u.level(k), 0, gx);
        if (dim == 2) diff_axis(g, u.level(k), 1, gy);
        const int kn = k + 1 < g.nt ? k + 1 : k;
        const int kp = kn == k ? k - 1 : k;
        double F = 0.0, mass = 0.0;
        Sample smp{};
        smp.dim = dim;
        smp.t = trel;
        for (int i0 = lo[0]; i0 <= hi[0]; i0 += stride)
            for (int i1 = lo[1]; i1 <= hi[1]; i1 += (dim == 2 ? stride : 1)) {
                const std::size_t s = g.flatten(i0, i1);
                smp.x[0] = g.x(i0) - o.x[0];
                smp.x[1] = dim == 2 ? g.x(i1) - o.x[1] : 0.0;
                const double G = backward_heat_kernel(smp.x, trel, dim);
                const double w = weight(i0, 0) * (dim == 2 ? weight(i1, 1) : 1.0);
                smp.u = u.at(k, s);
                smp.ut = (u.at(kn, s) - u.at(kp, s)) / g.ht();
                smp.grad[0] = gx[s];
                smp.grad[1] = dim == 2 ? gy[s] : 0.0;
                F += w * f(smp) * G;
                mass += w * G;
            }
        ts.push_back(g.t(k));
        Fs.push_back(F);
        out.mass_min = std::min(out.mass_min, mass);
    }

    // Exact integral of the piecewise-linear interpolant of F over [ta, tb].
    auto lerp = [&](std::size_t j, double t) { return Fs[j] + (Fs[j + 1] - Fs[j]) * (t - ts[j]) / (ts[j + 1] - ts[j]); };
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
        const double a = std::max(ta, ts[j]), b = std::min(tb, ts[j + 1]);
        if (b <= a) continue;
        out.integral += 0.5 * (b - a) * (lerp(j, a) + lerp(j, b));
    }
    return out;
}

double energy_integrand(const Sample& s, double k) {
    double g2 = 0.0;
    for (int i = 0; i < s.dim; ++i) g2 += s.grad[i] * s.grad[i];
    return g2 - k * std::max(s.u, 0.0) + s.u * s.u / s.t;
}

}  // namespace

std::string_view to_string(WeissVariant v) { return v == WeissVariant::paper_def ? "paper-def" : "proof-2x"; }

std::optional<WeissVariant> parse_weiss_variant(std::string_view s) {
    if (s == "paper-def") return WeissVariant::paper_def;
    if (s == "proof-2x") return WeissVariant::proof_2x;
    return std::nullopt;
}

double backward_heat_kernel(const double* x, double t, int n) {
    if (!(t < 0.0)) throw ParameterError("backward_heat_kernel: t must be negative");
    double x2 = 0.0;
    for (int i = 0; i < n; ++i) x2 += x[i] * x[i];
    return std::pow(4.0 * std::numbers::pi * (-t), -0.5 * n) * std::exp(x2 / (4.0 * t));
}

WeissValue weiss_energy(const SpaceTimeField& u, const SpaceTimePoint& o, double r, const WeissOptions& opt) {
    if (!(r > 0.0)) throw ParameterError("weiss_energy: r must be positive");
    const double k = opt.variant == WeissVariant::paper_def ? 1.0 : 2.0;
    const auto f = [k](const Sample& s) { return energy_integrand(s, k); };
    const StripResult fine = strip_integral(u, o, r, opt, 1, f);
    WeissValue v;
    const double r4 = r * r * r * r;
    v.psi = fine.integral / r4;
    v.kernel_mass_min = fine.mass_min;
    v.domain_truncated = fine.truncated;
    try {
        v.psi_coarse = strip_integral(u, o, r, opt, 2, f).integral / r4;
    } catch (const std::exception&) {
        v.psi_coarse = std::numeric_limits<double>::quiet_NaN();
    }
    return v;
}

double weiss_derivative_formula(const SpaceTimeField& u, const SpaceTimePoint& o, double r, const WeissOptions& opt) {
    const auto f = [](const Sample& s) {
        double xg = 0.0;
        for (int i = 0; i < s.dim; ++i) xg += s.x[i] * s.grad[i];
        const double q = 2.0 * s.t * s.ut + xg - 2.0 * s.u;
        return q * q / (-s.t);
    };
    return strip_integral(u, o, r, opt, 1, f).integral / std::pow(r, 5);
}

WeissDerivativeCheck weiss_derivative_check(const SpaceTimeField& u, const SpaceTimePoint& o, double r, double dr,
                                            const WeissOptions& opt) {
    if (!(dr > 0.0 && dr < r)) throw ParameterError("weiss_derivative_check: need 0 < dr < r");
    WeissDerivativeCheck c;
    c.r = r;
    c.dr = dr;
    c.fd = (weiss_energy(u, o, r + dr, opt).psi - weiss_energy(u, o, r - dr, opt).psi) / (2.0 * dr);
    c.formula = weiss_derivative_formula(u, o, r, opt);
    const double scale = std::max(std::abs(c.formula), std::abs(c.fd));
    c.rel_error = scale > 0.0 ? std::abs(c.fd - c.formula) / scale : 0.0;
    return c;
}

WeissCurve weiss_curve(const SpaceTimeField& u, const SpaceTimePoint& o, std::vector<double> rs,
                       const WeissOptions& opt, double dr_rel) {
    std::sort(rs.begin(), rs.end(), std::greater<>());
    WeissCurve c;
    c.variant = opt.variant;
    c.rs = rs;
    c.min_slope = std::numeric_limits<double>::infinity();
    c.kernel_mass_min = std::numeric_limits<double>::infinity();
    for (double r : rs) {
        const WeissValue v = weiss_energy(u, o, r, opt);
        const auto d = weiss_derivative_check(u, o, r, dr_rel * r, opt);
        c.psi.push_back(v.psi);
        c.quad_error.push_back(std::abs(v.psi - v.psi_coarse));
        c.dpsi_fd.push_back(d.fd);
        c.dpsi_formula.push_back(d.formula);
        c.kernel_mass_min = std::min(c.kernel_mass_min, v.kernel_mass_min);
        c.domain_truncated = c.domain_truncated || v.domain_truncated;
        c.min_slope = std::min(c.min_slope, d.fd);
    }
    return c;
}

void write_weiss_csv(std::ostream& os, const WeissCurve& c) {
    os << "r,psi,dpsi_fd,dpsi_formula,variant\n";
    char buf[160];
    for (std::size_t i = 0; i < c.rs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", c.rs[i], c.psi[i], c.dpsi_fd[i], c.dpsi_formula[i]);
        os << buf << to_string(c.variant) << '\n';
    }
}

double homogeneity_defect(const SpaceTimeField& u, const SpaceTimePoint& o, double r) {
    if (!(r > 0.0)) throw ParameterError("homogeneity_defect: r must be positive");
    const Grid& g = u.grid();
    const int dim = g.dim;
    double defect = 0.0, sup = 0.0;
    double x[2] = {0, 0}, y[2] = {0, 0};
    const double eps = 1e-12 * (g.b - g.a);
    for (int k = 0; k < g.nt; ++k) {
        const double ts = o.t + r * r * (g.t(k) - o.t);
        if (ts < g.t0 || ts > g.t1) continue;
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            g.coords(s, x);
            bool inside = true;
            for (int i = 0; i < dim; ++i) {
                y[i] = o.x[i] + r * (x[i] - o.x[i]);
                inside = inside && y[i] >= g.a - eps && y[i] <= g.b + eps;
            }
            if (!inside) continue;
            const double v = u.at(k, s);
            sup = std::max(sup, std::abs(v));
            defect = std::max(defect, std::abs(u.interpolate(y, ts) - r * r * v));
        }
    }
    return defect / (1.0 + r * r * sup);
}

GrowthSeries growth_series(const SpaceTimeField& u, const SpaceTimePoint& o, std::vector<double> rs) {
    const Grid& g = u.grid();
    std::sort(rs.begin(), rs.end(), std::greater<>());
    GrowthSeries gs;
    gs.rs = rs;
    for (double r : rs) {
        for (int i = 0; i < g.dim; ++i)
            if (o.x[i] - r < g.a || o.x[i] + r > g.b) throw DomainError("growth_series: Q_r leaves the spatial domain");
        if (o.t - r * r < g.t0 || o.t + r * r > g.t1) throw DomainError("growth_series: Q_r leaves the time range");
        ParabolicCylinder q;
        q.center = o.x;
        q.t = o.t;
        q.r = r;
        const auto nodes = restrict(g, q);
        if (nodes.size() == 0) throw DomainError("growth_series: Q_r holds no grid node");
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& nd : nodes.nodes) sup = std::max(sup, u.at(nd.k, nd.s));
        gs.S.push_back(sup / (r * r));
    }
    const auto [mn, mx] = std::minmax_element(gs.S.begin(), gs.S.end());
    gs.max_over_min = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
    gs.log_slope = (*mn > 0.0 && gs.rs.size() >= 2) ? loglog_slope(gs.rs, gs.S) : std::numeric_limits<double>::quiet_NaN();
    return gs;
}

}  // namespace ufb
