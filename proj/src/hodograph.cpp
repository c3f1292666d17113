#include "ufb/hodograph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "ufb/finite_difference.hpp"
#include "ufb/fit.hpp"
#include "ufb/holder.hpp"

namespace ufb {

namespace {

// Levels covering [ta, tb], at least three of them.
std::pair<int, int> level_range(const Grid& g, double ta, double tb) {
    int k0 = std::max(0, static_cast<int>(std::floor((ta - g.t0) / g.ht() + 1e-9)));
    int k1 = std::min(g.nt - 1, static_cast<int>(std::ceil((tb - g.t0) / g.ht() - 1e-9)));
    while (k1 - k0 < 2) {
        if (k1 < g.nt - 1) ++k1;
        else if (k0 > 0) --k0;
        else break;
    }
    return {k0, k1};
}

std::string node_name(const Grid& g, int k, std::size_t s) {
    double xs[2] = {0, 0};
    g.coords(s, xs);
    std::ostringstream os;
    os << "(x = " << xs[0];
    if (g.dim == 2) os << ", " << xs[1];
    os << ", t = " << g.t(k) << ")";
    return os.str();
}

// Nodes of the hodograph grid where the derivative relations can be evaluated.
std::vector<std::pair<int, std::size_t>> identity_nodes(const HodographField& h) {
    const Grid& g = h.v.grid();
    const std::size_t npl = g.nodes_per_level();
    std::vector<std::pair<int, std::size_t>> out;
    for (int k = 0; k + 1 < g.nt; ++k)
        for (std::size_t s = 0; s < npl; ++s) {
            if (g.on_spatial_boundary(s)) continue;
            int i0 = 0, i1 = 0;
            g.unflatten(s, i0, i1);
            bool ok = h.valid[(k + 1) * npl + s] != 0;
            for (int d0 = -1; d0 <= 1 && ok; ++d0)
                for (int d1 = (g.dim == 2 ? -1 : 0); d1 <= (g.dim == 2 ? 1 : 0) && ok; ++d1)
                    ok = h.valid[k * npl + g.flatten(i0 + d0, i1 + d1)] != 0;
            if (ok) out.emplace_back(k, s);
        }
    return out;
}

DerivativeBundle masked_derivatives(const HodographField& h) {
    SpaceTimeField filled = h.v;
    for (std::size_t i = 0; i < h.valid.size(); ++i)
        if (!h.valid[i]) filled.values()[i] = 0.0;
    return finite_differences(filled);
}

}  // namespace

RescaleParams RescaleParams::make(std::array<double, 2> center, double t, double grad_norm, double M, double alpha,
                                  double gamma) {
    if (!(M > 1.0)) throw ParameterError("rescale: M must exceed 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("rescale: alpha must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0 - alpha)) throw ParameterError("rescale: gamma must lie in (0, 1 - alpha)");
    if (!(grad_norm > 0.0)) throw InvalidInput("rescale: |grad u| vanishes at the center");
    RescaleParams p;
    p.center = center;
    p.t = t;
    p.M = M;
    p.alpha = alpha;
    p.gamma = gamma;
    p.grad_norm = grad_norm;
    p.r = std::pow(grad_norm / M, 1.0 / alpha);
    p.rho = std::pow(grad_norm / M, 1.0 / (1.0 - gamma));
    return p;
}

double interpolated_grad_norm(const SpaceTimeField& u, const double* x, double t) {
    const Grid& g = u.grid();
    const auto [k0, k1] = level_range(g, t, t);
    const SpaceTimeField w = u.time_window(k0, k1);
    double acc = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
        SpaceTimeField d(w.grid());
        for (int k = 0; k < w.grid().nt; ++k) diff_axis(w.grid(), w.level(k), axis, d.level(k));
        const double v = d.interpolate(x, t);
        acc += v * v;
    }
    return std::sqrt(acc);
}

RescaledField rescale(const SpaceTimeField& u, const RescaleParams& p, int n_out) {
    const Grid& g = u.grid();
    const int dim = g.dim;
    if (!(p.grad_norm > 0.0)) throw InvalidInput("rescale: |grad u| vanishes at the center");
    if (!(p.r > 0.0)) throw ParameterError("rescale: r must be positive");
    if (n_out < 3) throw ParameterError("rescale: n_out must be >= 3");
    const double r = p.r;
    for (int i = 0; i < dim; ++i)
        if (p.center[i] - 2 * r < g.a || p.center[i] + 2 * r > g.b)
            throw DomainError("rescale: Q_2r leaves the spatial domain");
    if (p.t - 4 * r * r < g.t0 || p.t + 4 * r * r > g.t1) throw DomainError("rescale: Q_2r leaves the time interval");

    const auto [k0, k1] = level_range(g, p.t - r * r - g.ht(), p.t + r * r + g.ht());
    const SpaceTimeField w = u.time_window(k0, k1);
    const DerivativeBundle b = finite_differences(w);
    const Grid& wg = w.grid();

    double g0[2] = {0, 0};
    for (int i = 0; i < dim; ++i) g0[i] = b.grad[i].interpolate(p.center.data(), p.t);
    const double gn = std::hypot(g0[0], g0[1]);
    if (!(gn > 0.0)) throw InvalidInput("rescale: finite-difference gradient vanishes at the center");

    RescaledField rf;
    rf.params = p;
    // Householder reflection exchanging grad u / |grad u| and e_n.
    if (dim == 1) {
        rf.rotation = {g0[0] > 0 ? 1.0 : -1.0, 0, 0, 1};
    } else {
        const double w0 = -g0[0] / gn, w1 = 1.0 - g0[1] / gn;
        const double ww = w0 * w0 + w1 * w1;
        if (ww > 1e-28) rf.rotation = {1 - 2 * w0 * w0 / ww, -2 * w0 * w1 / ww, -2 * w1 * w0 / ww, 1 - 2 * w1 * w1 / ww};
    }
    const auto& R = rf.rotation;

    const Grid og = Grid::make(dim, -1.0, 1.0, n_out, -1.0, 1.0, n_out);
    rf.ur = SpaceTimeField(og);
    rf.grad.assign(dim, SpaceTimeField(og));
    rf.ut = SpaceTimeField(og);
    rf.lap = SpaceTimeField(og);
    double y[2] = {0, 0}, x[2] = {0, 0};
    for (int k = 0; k < og.nt; ++k) {
        const double tt = p.t + r * r * og.t(k);
        for (std::size_t s = 0; s < og.nodes_per_level(); ++s) {
            og.coords(s, y);
            if (dim == 1) {
                x[0] = p.center[0] + r * R[0] * y[0];
            } else {
                x[0] = p.center[0] + r * (R[0] * y[0] + R[1] * y[1]);
                x[1] = p.center[1] + r * (R[2] * y[0] + R[3] * y[1]);
            }
            rf.ur.at(k, s) = w.interpolate(x, tt) / (gn * r);
            double gu[2] = {0, 0};
            for (int i = 0; i < dim; ++i) gu[i] = b.grad[i].interpolate(x, tt);
            if (dim == 1) {
                rf.grad[0].at(k, s) = R[0] * gu[0] / gn;
            } else {
                rf.grad[0].at(k, s) = (R[0] * gu[0] + R[2] * gu[1]) / gn;
                rf.grad[1].at(k, s) = (R[1] * gu[0] + R[3] * gu[1]) / gn;
            }
            rf.ut.at(k, s) = r * b.ut.interpolate(x, tt) / gn;
            double lap = 0.0;
            for (int i = 0; i < dim; ++i) lap += b.hess[i * dim + i].interpolate(x, tt);
            rf.lap.at(k, s) = r * lap / gn;
        }
    }
    rf.rhs_factor = r / gn;

    // Native nodes in the image of the sampled box and of Q_1.
    const double band = g.ht();
    const std::size_t npl = wg.nodes_per_level();
    const double h2 = wg.hx() * wg.hx();
    double d2max = 0.0;
    for (int k = 0; k < wg.nt; ++k) {
        const double tt = wg.t(k);
        if (std::abs(tt - p.t) > r * r) continue;
        for (std::size_t s = 0; s < npl; ++s) {
            wg.coords(s, x);
            const double dx = std::hypot(x[0] - p.center[0], dim == 2 ? x[1] - p.center[1] : 0.0);
            if (dx > r * std::sqrt(static_cast<double>(dim))) continue;
            double hs = 0.0;
            for (int i = 0; i < dim * dim; ++i) hs += b.hess[i].at(k, s) * b.hess[i].at(k, s);
            d2max = std::max(d2max, std::sqrt(hs));

            if (k == 0 || wg.on_spatial_boundary(s) || dx + std::sqrt(std::abs(tt - p.t)) >= r) continue;
            int i0 = 0, i1 = 0;
            wg.unflatten(s, i0, i1);
            bool all_pos = true, all_nonpos = true;
            auto see = [&](double v) {
                all_pos = all_pos && v > band;
                all_nonpos = all_nonpos && v <= 0.0;
            };
            see(w.at(k, s));
            see(w.at(k - 1, s));
            double lap = -2.0 * dim * w.at(k, s);
            for (int axis = 0; axis < dim; ++axis)
                for (int d : {-1, 1}) {
                    int j[2] = {i0, i1};
                    j[axis] += d;
                    const double v = w.at(k, wg.flatten(j[0], j[1]));
                    see(v);
                    lap += v;
                }
            if (!all_pos && !all_nonpos) continue;
            const double res = (w.at(k, s) - w.at(k - 1, s)) / wg.ht() - lap / h2 - (all_pos ? 1.0 : 0.0);
            rf.q5_residual = std::max(rf.q5_residual, rf.rhs_factor * std::abs(res));
            ++rf.q5_nodes;
        }
    }
    rf.disc_tol = wg.hx() * d2max / gn;
    return rf;
}

RescaleReport verify_rescale_properties(const RescaledField& rf) {
    const Grid& g = rf.ur.grid();
    const int dim = g.dim;
    const double M = rf.params.M;
    RescaleReport rep;
    rep.tol = 0.5 / M + rf.disc_tol;

    const int mid = (g.nx - 1) / 2, kmid = (g.nt - 1) / 2;
    const double y0[2] = {0.0, 0.0};
    double e = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double gi = (g.nx % 2 == 1 && g.nt % 2 == 1) ? rf.grad[i].at(kmid, g.flatten(mid, mid))
                                                             : rf.grad[i].interpolate(y0, 0.0);
        const double target = (i == dim - 1) ? 1.0 : 0.0;
        e += (gi - target) * (gi - target);
    }
    rep.q1_error = std::sqrt(e);

    rep.q2_min = std::numeric_limits<double>::infinity();
    double y[2] = {0, 0};
    for (int k = 0; k < g.nt; ++k)
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            g.coords(s, y);
            if (std::hypot(y[0], dim == 2 ? y[1] : 0.0) + std::sqrt(std::abs(g.t(k))) >= 1.0) continue;
            ++rep.nodes;
            double gg = 0.0;
            for (int i = 0; i < dim; ++i) gg += rf.grad[i].at(k, s) * rf.grad[i].at(k, s);
            gg = std::sqrt(gg);
            rep.q2_min = std::min(rep.q2_min, gg);
            rep.q2_max = std::max(rep.q2_max, gg);
            for (int i = 0; i + 1 < dim; ++i) rep.q3_max = std::max(rep.q3_max, std::abs(rf.grad[i].at(k, s)));
            rep.q4_max = std::max(rep.q4_max, std::abs(rf.ur.at(k, s)));
        }
    rep.q5_residual = rf.q5_residual;
    rep.q1 = rep.q1_error <= 1e-8;
    rep.q2 = rep.q2_min >= 1.0 - 1.0 / M - rep.tol && rep.q2_max <= 1.0 + 1.0 / M + rep.tol;
    rep.q3 = rep.q3_max <= 2.0 / M + rep.tol;
    rep.q4 = rep.q4_max <= 1.0 + 2.0 / M + rep.tol;
    rep.q5 = rep.q5_residual <= rep.tol;
    return rep;
}

HodographField hodograph_transform(const SpaceTimeField& ur, double delta) {
    if (!(delta > 0.0)) throw ParameterError("hodograph_transform: delta must be positive");
    if (!ur.all_finite()) throw InvalidInput("hodograph_transform: non-finite input");
    const Grid& g = ur.grid();
    const int n = g.nx;
    const double h = g.hx();
    const std::size_t npl = g.nodes_per_level();
    HodographField out;
    out.delta = delta;
    out.v = SpaceTimeField(g, std::numeric_limits<double>::quiet_NaN());
    out.valid.assign(g.size(), 0);

    const int columns = g.dim == 1 ? 1 : n;
    std::vector<double> col(n);
    for (int k = 0; k < g.nt; ++k)
        for (int c = 0; c < columns; ++c) {
            auto node = [&](int j) { return g.dim == 1 ? g.flatten(j) : g.flatten(c, j); };
            for (int j = 0; j < n; ++j) col[j] = ur.at(k, node(j));
            for (int j = 0; j + 1 < n; ++j)
                if (!((col[j + 1] - col[j]) / h >= delta))
                    throw InvalidInput("hodograph_transform: d_n u below delta at " + node_name(g, k, node(j)));
            for (int j = 0; j < n; ++j) {
                const double target = g.x(j);
                if (target < col.front() || target > col.back()) continue;
                const auto it = std::upper_bound(col.begin(), col.end(), target);
                const int m = std::clamp(static_cast<int>(it - col.begin()) - 1, 0, n - 2);
                const double v = g.x(m) + h * (target - col[m]) / (col[m + 1] - col[m]);
                out.v.at(k, node(j)) = v;
                out.valid[k * npl + node(j)] = 1;
                const double back = col[m] + (col[m + 1] - col[m]) * (v - g.x(m)) / h;
                out.roundtrip = std::max(out.roundtrip, std::abs(back - target));
            }
        }
    return out;
}

double IdentityResiduals::worst() const { return *std::max_element(max_abs.begin(), max_abs.end()); }

IdentityResiduals derivative_identities(const SpaceTimeField& ur, const HodographField& h) {
    const Grid& g = ur.grid();
    if (!g.same_shape(h.v.grid())) throw InvalidInput("derivative_identities: grid mismatch");
    const int dim = g.dim;
    const int n = dim - 1;  // index of the x_n axis
    const DerivativeBundle bu = finite_differences(ur);
    const DerivativeBundle bv = masked_derivatives(h);
    IdentityResiduals res;
    double x[2] = {0, 0};
    for (const auto& [k, s] : identity_nodes(h)) {
        g.coords(s, x);
        x[n] = h.v.at(k, s);
        const double t = g.t(k);
        auto U = [&](const SpaceTimeField& f) { return f.interpolate(x, t); };
        const double un = U(bu.grad[n]), unn = U(bu.hess[n * dim + n]), ut = U(bu.ut);
        const double vn = bv.grad[n].at(k, s), vnn = bv.hess[n * dim + n].at(k, s), vt = bv.ut.at(k, s);
        auto upd = [&](int i, double r) { res.max_abs[i] = std::max(res.max_abs[i], std::abs(r)); };
        upd(0, un * vn - 1.0);
        upd(2, ut + un * vt);
        upd(3, unn * vn * vn + un * vnn);
        if (dim == 2) {
            const double u1 = U(bu.grad[0]), u1n = U(bu.hess[1]), u11 = U(bu.hess[0]);
            const double v1 = bv.grad[0].at(k, s), v1n = bv.hess[1].at(k, s), v11 = bv.hess[0].at(k, s);
            upd(1, u1 + un * v1);
            upd(4, u1n * vn + unn * v1 * vn + un * v1n);
            upd(5, u11 + 2.0 * u1n * v1 + unn * v1 * v1 + un * v11);
        }
        ++res.nodes;
    }
    return res;
}

std::array<double, 4> coefficient_matrix_at(const double* gv, int n) {
    const double vn = gv[n - 1];
    if (n == 1) return {1.0 / (vn * vn * vn), 0, 0, 0};
    const double v1 = gv[0];
    const double off = -v1 / (vn * vn);
    return {1.0 / vn, off, off, (1.0 + v1 * v1) / (vn * vn * vn)};
}

std::array<double, 2> symmetric_eigen_bounds(const std::array<double, 4>& A, int n) {
    if (n == 1) return {A[0], A[0]};
    const double m = 0.5 * (A[0] + A[3]);
    const double d = std::hypot(0.5 * (A[0] - A[3]), A[1]);
    return {m - d, m + d};
}

CoefficientMatrix coefficient_matrix(const HodographField& h) {
    const Grid& g = h.v.grid();
    const int dim = g.dim;
    const DerivativeBundle bv = masked_derivatives(h);
    CoefficientMatrix cm;
    cm.n = dim;
    cm.lambda_min = std::numeric_limits<double>::infinity();
    cm.lambda_max = -std::numeric_limits<double>::infinity();
    const std::size_t npl = g.nodes_per_level();
    for (const auto& [k, s] : identity_nodes(h)) {
        double gv[2] = {0, 0};
        for (int i = 0; i < dim; ++i) gv[i] = bv.grad[i].at(k, s);
        if (!(gv[dim - 1] > 0.0))
            throw InvalidInput("coefficient_matrix: v_n <= 0 at " + node_name(g, k, s));
        const auto A = coefficient_matrix_at(gv, dim);
        const auto ev = symmetric_eigen_bounds(A, dim);
        cm.lambda_min = std::min(cm.lambda_min, ev[0]);
        cm.lambda_max = std::max(cm.lambda_max, ev[1]);
        cm.nodes.push_back(k * npl + s);
        cm.A.push_back(A);
    }
    if (cm.nodes.empty()) throw InvalidInput("coefficient_matrix: no valid interior nodes");
    return cm;
}

std::array<double, 2> ellipticity_envelope(double M, int n) {
    if (!(M > 1.0)) throw ParameterError("ellipticity_envelope: M must exceed 1");
    const double vlo = 1.0 / (1.0 + 1.0 / M), vhi = 1.0 / (1.0 - 1.0 / M);
    if (n == 1) return {1.0 / (vhi * vhi * vhi), 1.0 / (vlo * vlo * vlo)};
    const double vb = (2.0 / M) / (1.0 - 1.0 / M);
    const double b = vb / (vlo * vlo);
    const double amin = 1.0 / vhi, amax = 1.0 / vlo;
    const double dmin = 1.0 / (vhi * vhi * vhi), dmax = (1.0 + vb * vb) / (vlo * vlo * vlo);
    return {std::min(amin, dmin) - b, std::max(amax, dmax) + b};
}

UtHolderReport ut_holder_diagnostic(const SpaceTimeField& u, const ParabolicCylinder& q, double alpha, double delta) {
    const Grid& g = u.grid();
    const auto [k0, k1] = level_range(g, q.t - q.r * q.r - g.ht(), q.t + q.r * q.r + g.ht());
    const SpaceTimeField w = u.time_window(k0, k1);
    const DerivativeBundle b = finite_differences(w);
    UtHolderReport rep;
    rep.alpha = alpha;
    rep.min_grad = std::numeric_limits<double>::infinity();
    const auto full = restrict(w.grid(), q);
    if (full.size() < 2) throw InvalidInput("ut_holder_diagnostic: cylinder holds fewer than two nodes");
    for (const auto& nd : full.nodes) {
        rep.min_grad = std::min(rep.min_grad, b.grad_norm(nd.k, nd.s));
        rep.sup_full = std::max(rep.sup_full, std::abs(b.ut.at(nd.k, nd.s)));
    }
    if (rep.min_grad < delta)
        throw InvalidInput("ut_holder_diagnostic: region is not noncritical (min |grad u| = " +
                           std::to_string(rep.min_grad) + ")");
    ParabolicCylinder half = q;
    half.r = 0.5 * q.r;
    const auto hn = discrete_holder_norm(b.ut, alpha, half, HolderMode::parabolic);
    rep.seminorm_half = hn.seminorm;
    rep.norm_half = hn.norm;
    rep.nodes_half = hn.nodes;
    rep.ratio = rep.sup_full > 0.0 ? rep.norm_half / rep.sup_full : std::numeric_limits<double>::infinity();
    return rep;
}

ScalingLawReport scaling_law(const SpaceTimeField& u, const std::vector<BoundaryPoint>& points, double M,
                             double gamma) {
    if (!(M > 0.0)) throw ParameterError("scaling_law: M must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("scaling_law: gamma must lie in (0,1)");
    const Grid& g = u.grid();
    const double ht = g.ht();
    ScalingLawReport rep;
    rep.M = M;
    rep.gamma = gamma;
    for (const auto& pt : points) {
        if (!(pt.grad_norm > 0.0)) continue;
        const double rho = std::pow(pt.grad_norm / M, 1.0 / (1.0 - gamma));
        if (0.5 * rho < 2.0 * g.hx()) continue;
        ParabolicCylinder q;
        q.center = pt.x;
        q.t = pt.t;
        q.r = 0.5 * rho;
        double sup = 0.0;
        bool any = false;
        for (const auto& nd : restrict(g, q).nodes) {
            if (nd.k + 1 >= g.nt) continue;
            const double a = u.at(nd.k, nd.s), b = u.at(nd.k + 1, nd.s);
            if (a > ht && b > ht) {
                sup = std::max(sup, std::abs(b - a) / ht);
                any = true;
            }
        }
        if (!any || !(sup > 0.0)) continue;
        rep.grads.push_back(pt.grad_norm);
        rep.rhos.push_back(rho);
        rep.sups.push_back(sup);
        rep.fitted_C = std::max(rep.fitted_C, sup / (M * std::pow(rho, -gamma)));
    }
    if (rep.rhos.size() < 3) throw InvalidInput("scaling_law: fewer than 3 resolvable boundary points");
    rep.slope = loglog_slope(rep.rhos, rep.sups);
    rep.pass = rep.slope >= -gamma - 0.2;
    return rep;
}

void write_coefficient_csv(std::ostream& os, const CoefficientMatrix& cm) {
    os << (cm.n == 1 ? "node,a11\n" : "node,a11,a12,a21,a22\n");
    char buf[64];
    for (std::size_t i = 0; i < cm.nodes.size(); ++i) {
        os << cm.nodes[i];
        for (int j = 0; j < cm.n * cm.n; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", cm.A[i][j]);
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace ufb
