#include "ufb/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ufb/cylinder.hpp"
#include "ufb/finite_difference.hpp"
#include "ufb/fit.hpp"
#include "ufb/holder.hpp"

namespace ufb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double spatial_distance(const Grid& g, std::size_t s1, std::size_t s2) {
    double a[2] = {0, 0}, b[2] = {0, 0};
    g.coords(s1, a);
    g.coords(s2, b);
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Second-order gradient of level k at node s (one-sided on the boundary).
void level_gradient(const SpaceTimeField& u, int k, std::size_t s, double* out) {
    const Grid& g = u.grid();
    int idx[2] = {0, 0};
    g.unflatten(s, idx[0], idx[1]);
    const double h = g.hx();
    for (int axis = 0; axis < g.dim; ++axis) {
        auto v = [&](int i) {
            int j[2] = {idx[0], idx[1]};
            j[axis] = i;
            return u.at(k, g.flatten(j[0], j[1]));
        };
        const int i = idx[axis];
        if (i == 0)
            out[axis] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
        else if (i == g.nx - 1)
            out[axis] = (3.0 * v(i) - 4.0 * v(i - 1) + v(i - 2)) / (2.0 * h);
        else
            out[axis] = (v(i + 1) - v(i - 1)) / (2.0 * h);
    }
}

// Larger of the two one-sided differences along each axis, combined as a norm.
double one_sided_gradient(const SpaceTimeField& u, int k, std::size_t s) {
    const Grid& g = u.grid();
    int idx[2] = {0, 0};
    g.unflatten(s, idx[0], idx[1]);
    double acc = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
        double m = 0.0;
        for (int d : {-1, 1}) {
            int j[2] = {idx[0], idx[1]};
            j[axis] += d;
            if (j[axis] < 0 || j[axis] >= g.nx) continue;
            m = std::max(m, std::abs(u.at(k, g.flatten(j[0], j[1])) - u.at(k, s)) / g.hx());
        }
        acc += m * m;
    }
    return std::sqrt(acc);
}

std::vector<SpaceTimeField> gradient_fields(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    std::vector<SpaceTimeField> out(g.dim, SpaceTimeField(g));
    for (int k = 0; k < g.nt; ++k)
        for (int axis = 0; axis < g.dim; ++axis) diff_axis(g, u.level(k), axis, out[axis].level(k));
    return out;
}

double gradient_seminorm(const SpaceTimeField& u, double alpha, const ParabolicCylinder& q) {
    double best = 0.0;
    for (const auto& gi : gradient_fields(u))
        best = std::max(best, discrete_holder_norm(gi, alpha, q, HolderMode::parabolic).seminorm);
    return best;
}

}  // namespace

std::size_t FreeBoundaryGraph::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

FreeBoundaryGraph extract_graph(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    const std::size_t npl = g.nodes_per_level();
    FreeBoundaryGraph out;
    out.grid = g;
    out.H.assign(npl, kNaN);
    out.gradH.assign(npl, {kNaN, kNaN});
    out.valid.assign(npl, 0);
    out.lower_level.assign(npl, -1);

    for (std::size_t s = 0; s < npl; ++s) {
        int crossing = -1;
        for (int k = 0; k + 1 < g.nt; ++k) {
            const bool below = u.at(k, s) <= 0.0, above = u.at(k + 1, s) > 0.0;
            if (below && above) {
                if (crossing >= 0) {
                    std::ostringstream os;
                    double xs[2] = {0, 0};
                    g.coords(s, xs);
                    os << "extract_graph: second sign change in column x = " << xs[0];
                    if (g.dim == 2) os << "," << xs[1];
                    os << " (levels " << crossing << " and " << k << ")";
                    throw InvalidInput(os.str());
                }
                crossing = k;
            } else if (!below && !above && crossing >= 0) {
                double xs[2] = {0, 0};
                g.coords(s, xs);
                throw InvalidInput("extract_graph: column x = " + std::to_string(xs[0]) +
                                   " returns to u <= 0 after crossing");
            }
        }
        if (crossing < 0) continue;
        const double lo = u.at(crossing, s), hi = u.at(crossing + 1, s);
        out.H[s] = g.t(crossing) + g.ht() * (-lo) / (hi - lo);
        out.valid[s] = 1;
        out.lower_level[s] = crossing;
    }

    for (std::size_t s = 0; s < npl; ++s) {
        if (!out.valid[s]) continue;
        int idx[2] = {0, 0};
        g.unflatten(s, idx[0], idx[1]);
        for (int axis = 0; axis < g.dim; ++axis) {
            auto neighbour = [&](int d) -> std::size_t {
                int j[2] = {idx[0], idx[1]};
                j[axis] += d;
                if (j[axis] < 0 || j[axis] >= g.nx) return npl;
                const std::size_t n = g.flatten(j[0], j[1]);
                return out.valid[n] ? n : npl;
            };
            const std::size_t m = neighbour(-1), p = neighbour(1);
            if (m < npl && p < npl)
                out.gradH[s][axis] = (out.H[p] - out.H[m]) / (2.0 * g.hx());
            else if (p < npl)
                out.gradH[s][axis] = (out.H[p] - out.H[s]) / g.hx();
            else if (m < npl)
                out.gradH[s][axis] = (out.H[s] - out.H[m]) / g.hx();
        }
    }
    return out;
}

LipschitzReport lipschitz_report(const FreeBoundaryGraph& fb, const SpaceTimeField& u, double c) {
    if (fb.empty()) throw InvalidInput("lipschitz_report: empty free-boundary graph");
    if (!(c > 0.0)) throw ParameterError("lipschitz_report: c must be positive");
    const Grid& g = fb.grid;
    std::vector<std::size_t> nodes;
    double hmax = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < fb.H.size(); ++s)
        if (fb.valid[s]) {
            nodes.push_back(s);
            hmax = std::max(hmax, fb.H[s]);
        }

    LipschitzReport r;
    r.c = c;
    if (nodes.size() <= 5000) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                const double d = spatial_distance(g, nodes[i], nodes[j]);
                r.lip = std::max(r.lip, std::abs(fb.H[nodes[i]] - fb.H[nodes[j]]) / d);
                ++r.pairs;
            }
    } else {
        for (std::size_t s : nodes)
            for (int axis = 0; axis < g.dim; ++axis) {
                int idx[2] = {0, 0};
                g.unflatten(s, idx[0], idx[1]);
                idx[axis] += 1;
                if (idx[axis] >= g.nx) continue;
                const std::size_t n = g.flatten(idx[0], idx[1]);
                if (!fb.valid[n]) continue;
                r.lip = std::max(r.lip, std::abs(fb.H[n] - fb.H[s]) / g.hx());
                ++r.pairs;
            }
    }

    r.window_t0 = g.t0;
    r.window_t1 = std::min(g.t1, hmax + g.ht());
    double grad[2] = {0, 0};
    for (int k = 0; k < g.nt && g.t(k) <= r.window_t1 + 1e-12 * g.ht(); ++k)
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            level_gradient(u, k, s, grad);
            r.grad_sup = std::max(r.grad_sup, std::hypot(grad[0], g.dim == 2 ? grad[1] : 0.0));
        }
    r.bound = r.grad_sup / c;
    r.pass = r.lip <= 1.1 * r.bound;
    return r;
}

std::array<double, 3> gauss_map(const double* grad, int dim, double ut) {
    std::array<double, 3> xi{0, 0, 0};
    for (int i = 0; i < dim; ++i) xi[i] = grad[i];
    xi[dim] = ut;
    double n = 0.0;
    for (int i = 0; i <= dim; ++i) n += xi[i] * xi[i];
    n = std::sqrt(n);
    if (!(n > 0.0)) throw InvalidInput("gauss_map: zero vector");
    for (int i = 0; i <= dim; ++i) xi[i] /= n;
    return xi;
}

NormalField normal_field(const FreeBoundaryGraph& fb, const SpaceTimeField& u) {
    const Grid& g = fb.grid;
    NormalField nf;
    nf.dim = g.dim;
    for (std::size_t s = 0; s < fb.H.size(); ++s) {
        if (!fb.valid[s]) continue;
        const int k = fb.lower_level[s] + 1;
        if (k + 1 >= g.nt) continue;
        double grad[2] = {0, 0};
        level_gradient(u, k, s, grad);
        const double ut = (u.at(k + 1, s) - u.at(k, s)) / g.ht();
        const double gn = std::hypot(grad[0], grad[1]);
        if (gn == 0.0 && ut == 0.0) continue;
        std::array<double, 2> xs{0, 0};
        g.coords(s, xs.data());
        nf.nodes.push_back(s);
        nf.x.push_back(xs);
        nf.H.push_back(fb.H[s]);
        nf.nu.push_back(gauss_map(grad, g.dim, ut));
        nf.grad_norm.push_back(gn);
        nf.ut_plus.push_back(ut);
        nf.theta.push_back(std::atan2(gn, ut));
    }
    return nf;
}

NormalHolderReport normal_holder_report(const NormalField& nf, double alpha, double c) {
    if (nf.size() < 2) throw InvalidInput("normal_holder_report: fewer than two boundary samples");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("normal_holder_report: alpha must lie in (0,1]");
    NormalHolderReport r;
    r.alpha = alpha;
    r.cone_excess = -std::numeric_limits<double>::infinity();
    const int m = nf.dim + 1;
    for (std::size_t i = 0; i < nf.size(); ++i) {
        double n2 = 0.0;
        for (int d = 0; d < m; ++d) n2 += nf.nu[i][d] * nf.nu[i][d];
        r.unit_defect = std::max(r.unit_defect, std::abs(std::sqrt(n2) - 1.0));
        const double cone = nf.grad_norm[i] / std::sqrt(nf.grad_norm[i] * nf.grad_norm[i] + c * c);
        r.cone_excess = std::max(r.cone_excess, std::sin(nf.theta[i]) - cone);
        for (std::size_t j = i + 1; j < nf.size(); ++j) {
            double dn = 0.0;
            for (int d = 0; d < m; ++d) dn += (nf.nu[i][d] - nf.nu[j][d]) * (nf.nu[i][d] - nf.nu[j][d]);
            const double dx = std::hypot(nf.x[i][0] - nf.x[j][0], nf.x[i][1] - nf.x[j][1]);
            r.seminorm = std::max(r.seminorm, std::sqrt(dn) / std::pow(dx, 0.5 * alpha));
            ++r.pairs;
        }
    }
    r.cone_pass = r.cone_excess <= 1e-6;
    return r;
}

std::string to_string(PinchingStatus s) {
    switch (s) {
        case PinchingStatus::pass: return "pass";
        case PinchingStatus::fail: return "fail";
        case PinchingStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

SpaceTimeField coarsen2(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    if (g.nx % 2 == 0 || g.nt % 2 == 0) throw InvalidInput("coarsen2: nx and nt must be odd");
    const Grid c = Grid::make(g.dim, g.a, g.b, (g.nx + 1) / 2, g.t0, g.t1, (g.nt + 1) / 2);
    SpaceTimeField out(c);
    for (int k = 0; k < c.nt; ++k)
        for (std::size_t s = 0; s < c.nodes_per_level(); ++s) {
            int i0 = 0, i1 = 0;
            c.unflatten(s, i0, i1);
            out.at(k, s) = u.at(2 * k, g.flatten(2 * i0, 2 * i1));
        }
    return out;
}

PinchingReport pinching_check(const FreeBoundaryGraph& fb, const SpaceTimeField& u, std::size_t x0, double alpha,
                              const PinchingOptions& opt) {
    const Grid& g = fb.grid;
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("pinching_check: alpha must lie in (0,1)");
    if (x0 >= fb.H.size()) throw InvalidInput("pinching_check: x0 out of range");
    PinchingReport r;
    r.x0 = x0;
    r.alpha = alpha;
    if (!fb.valid[x0]) {
        r.reason = "x0 is not on the free-boundary graph";
        return r;
    }

    const int kl = fb.lower_level[x0];
    r.grad_at_x0 = std::max(one_sided_gradient(u, kl, x0), one_sided_gradient(u, kl + 1, x0));

    // Gradient seminorm on a parabolic cylinder around (x0, H(x0)), at h and 2h.
    ParabolicCylinder q;
    g.coords(x0, q.center.data());
    q.t = fb.H[x0];
    q.r = opt.probe_radius;
    const double tw = opt.probe_radius * opt.probe_radius;
    int k0 = std::max(0, static_cast<int>(std::floor((q.t - tw - g.t0) / g.ht())));
    int k1 = std::min(g.nt - 1, static_cast<int>(std::ceil((q.t + tw - g.t0) / g.ht())));
    if ((k1 - k0) % 2 != 0) (k1 < g.nt - 1) ? ++k1 : --k0;
    if (k0 < 0 || k1 - k0 < 4) {
        r.reason = "not enough time levels around x0 for the gradient seminorm";
        return r;
    }
    const SpaceTimeField window = u.time_window(k0, k1);
    r.grad_seminorm = gradient_seminorm(window, alpha, q);
    r.grad_tol = 10.0 * r.grad_seminorm * std::pow(g.hx(), alpha);
    if (!(r.grad_at_x0 < r.grad_tol)) {
        r.reason = "|grad u| at x0 exceeds grad_tol; not a spatial critical point";
        return r;
    }
    if (g.nx % 2 == 1) {
        r.grad_seminorm_coarse = gradient_seminorm(coarsen2(window), alpha, q);
        if (r.grad_seminorm_coarse > 0.0 && r.grad_seminorm / r.grad_seminorm_coarse > opt.coarse_ratio_max) {
            r.reason = "gradient seminorm grows under refinement; gradient not resolved as Holder continuous";
            return r;
        }
    }

    // Largest radius around x0 on which the graph is valid.
    double valid_radius = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < fb.H.size(); ++s)
        if (!fb.valid[s]) valid_radius = std::min(valid_radius, spatial_distance(g, s, x0));
    if (!std::isfinite(valid_radius)) valid_radius = g.b - g.a;
    const double rho_min = 2.0 * g.hx();
    for (double rho = 0.5 * valid_radius; rho >= rho_min; rho *= 0.5) {
        double sup = 0.0;
        for (std::size_t s = 0; s < fb.H.size(); ++s)
            if (fb.valid[s] && spatial_distance(g, s, x0) <= rho) sup = std::max(sup, std::abs(fb.H[s] - fb.H[x0]));
        r.rhos.push_back(rho);
        r.sups.push_back(sup);
    }
    if (static_cast<int>(r.rhos.size()) < opt.min_scales) {
        r.reason = "fewer than " + std::to_string(opt.min_scales) + " dyadic scales resolvable";
        return r;
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.rhos.size(); ++i) {
        if (!(r.sups[i] > 0.0)) {
            r.reason = "graph is flat at rho = " + std::to_string(r.rhos[i]) + "; exponent undefined";
            return r;
        }
        lx.push_back(std::log(r.rhos[i]));
        ly.push_back(std::log(r.sups[i]));
    }
    r.exponent = least_squares_slope(lx, ly);
    const bool ok = r.exponent >= 1.0 + alpha - opt.exponent_slack;
    r.status = ok ? PinchingStatus::pass : PinchingStatus::fail;
    r.reason = ok ? "exponent above 1 + alpha - slack" : "exponent below 1 + alpha - slack";
    return r;
}

void write_boundary_csv(std::ostream& os, const FreeBoundaryGraph& fb, const NormalField& nf) {
    const int dim = fb.grid.dim;
    os << (dim == 1 ? "x,H,dHdx" : "x1,x2,H,dHdx1,dHdx2") << ",grad_norm,ut_plus,theta\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t i = 0; i < nf.size(); ++i) {
        const std::size_t s = nf.nodes[i];
        for (int d = 0; d < dim; ++d) put(nf.x[i][d]), os << ',';
        put(fb.H[s]);
        for (int d = 0; d < dim; ++d) os << ',', put(fb.gradH[s][d]);
        os << ',';
        put(nf.grad_norm[i]);
        os << ',';
        put(nf.ut_plus[i]);
        os << ',';
        put(nf.theta[i]);
        os << '\n';
    }
}

}  // namespace ufb
