#include "ufb/regularized_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ufb/finite_difference.hpp"

namespace ufb {

double f_eps(double x, double eps) {
    if (!(eps > 0.0)) throw ParameterError("f_eps: eps must be positive");
    if (x < 0.0) return 0.0;
    if (x <= eps) return x / eps;
    return 1.0;
}

RegularizationSchedule RegularizationSchedule::default_schedule() {
    RegularizationSchedule s;
    for (int k = 0; k <= 12; ++k) s.eps_values.push_back(0.1 * std::ldexp(1.0, -k));
    return s;
}

void RegularizationSchedule::validate() const {
    if (eps_values.empty()) throw InvalidInput("schedule: eps_values is empty");
    for (std::size_t k = 0; k < eps_values.size(); ++k) {
        if (!(eps_values[k] > 0.0)) throw InvalidInput("schedule: eps values must be positive");
        if (k > 0 && !(eps_values[k] < eps_values[k - 1]))
            throw InvalidInput("schedule: eps values must be strictly decreasing");
    }
    if (!(stop_tol > 0.0)) throw InvalidInput("schedule: stop_tol must be positive");
    if (!(picard_tol > 0.0)) throw InvalidInput("schedule: picard_tol must be positive");
    if (max_picard < 1) throw InvalidInput("schedule: max_picard must be >= 1");
}

namespace {

/// (I - ht Delta_h) on interior nodes with Dirichlet values taken from the full level vector.
class ImplicitDiffusion {
public:
    explicit ImplicitDiffusion(const Grid& g) : g_(g), lambda_(g.ht() / (g.hx() * g.hx())) {
        if (g.dim == 1) factor_tridiagonal();
    }

    /// Solves for the interior of `u` given rhs on interior nodes; boundary entries of `u`
    /// must already hold the Dirichlet values. Returns the CG iteration count (0 in 1D).
    long solve(std::span<const double> rhs, std::span<double> u) {
        return g_.dim == 1 ? solve_1d(rhs, u) : solve_2d(rhs, u);
    }

private:
    void factor_tridiagonal() {
        const int m = g_.nx - 2;
        cprime_.resize(m);
        denom_.resize(m);
        const double diag = 1.0 + 2.0 * lambda_;
        const double off = -lambda_;
        double prev = 0.0;
        for (int i = 0; i < m; ++i) {
            denom_[i] = diag - off * prev;
            cprime_[i] = off / denom_[i];
            prev = cprime_[i];
        }
    }

    long solve_1d(std::span<const double> rhs, std::span<double> u) {
        const int n = g_.nx;
        const int m = n - 2;
        work_.resize(m);
        const double off = -lambda_;
        for (int i = 0; i < m; ++i) {
            double r = rhs[i + 1];
            if (i == 0) r += lambda_ * u[0];
            if (i == m - 1) r += lambda_ * u[n - 1];
            work_[i] = (r - off * (i > 0 ? work_[i - 1] : 0.0)) / denom_[i];
        }
        for (int i = m - 1; i >= 0; --i) {
            if (i < m - 1) work_[i] -= cprime_[i] * work_[i + 1];
            u[i + 1] = work_[i];
        }
        return 0;
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        const int n = g_.nx;
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) {
                const std::size_t s = g_.flatten(i, j);
                double nb = 0.0;
                if (i > 1) nb += x[s - n];
                if (i < n - 2) nb += x[s + n];
                if (j > 1) nb += x[s - 1];
                if (j < n - 2) nb += x[s + 1];
                y[s] = (1.0 + 4.0 * lambda_) * x[s] - lambda_ * nb;
            }
    }

    long solve_2d(std::span<const double> rhs, std::span<double> u) {
        const int n = g_.nx;
        const std::size_t npl = g_.nodes_per_level();
        b_.assign(npl, 0.0);
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) {
                const std::size_t s = g_.flatten(i, j);
                double bc = 0.0;
                if (i == 1) bc += u[s - n];
                if (i == n - 2) bc += u[s + n];
                if (j == 1) bc += u[s - 1];
                if (j == n - 2) bc += u[s + 1];
                b_[s] = rhs[s] + lambda_ * bc;
            }
        // Jacobi-preconditioned CG, warm-started from the current interior of u.
        x_.assign(npl, 0.0);
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) x_[g_.flatten(i, j)] = u[g_.flatten(i, j)];
        r_.assign(npl, 0.0);
        ap_.assign(npl, 0.0);
        apply(x_, ap_);
        const double dinv = 1.0 / (1.0 + 4.0 * lambda_);
        double bnorm = 0.0, rz = 0.0;
        z_.assign(npl, 0.0);
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) {
                const std::size_t s = g_.flatten(i, j);
                r_[s] = b_[s] - ap_[s];
                z_[s] = r_[s] * dinv;
                rz += r_[s] * z_[s];
                bnorm += b_[s] * b_[s];
            }
        bnorm = std::sqrt(bnorm);
        const double tol = 1e-12 * std::max(bnorm, 1e-300);
        p_ = z_;
        long it = 0;
        const long max_it = 20L * (n - 2) * (n - 2) + 100;
        auto rnorm = [&] {
            double acc = 0.0;
            for (double v : r_) acc += v * v;
            return std::sqrt(acc);
        };
        while (rnorm() > tol) {
            if (++it > max_it) throw ConvergenceError("conjugate gradients: residual did not reach 1e-12 * |b|", rnorm());
            apply(p_, ap_);
            double pap = 0.0;
            for (std::size_t s = 0; s < npl; ++s) pap += p_[s] * ap_[s];
            if (!(pap > 0.0)) throw ConvergenceError("conjugate gradients: breakdown (p^T A p <= 0)", rnorm());
            const double alpha = rz / pap;
            double rz_new = 0.0;
            for (std::size_t s = 0; s < npl; ++s) {
                x_[s] += alpha * p_[s];
                r_[s] -= alpha * ap_[s];
                z_[s] = r_[s] * dinv;
                rz_new += r_[s] * z_[s];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t s = 0; s < npl; ++s) p_[s] = z_[s] + beta * p_[s];
        }
        for (int i = 1; i < n - 1; ++i)
            for (int j = 1; j < n - 1; ++j) u[g_.flatten(i, j)] = x_[g_.flatten(i, j)];
        return it;
    }

    Grid g_;
    double lambda_;
    std::vector<double> cprime_, denom_, work_;
    std::vector<double> b_, x_, r_, z_, p_, ap_;
};

void set_boundary(const ScenarioSpec& spec, const std::vector<std::size_t>& bnodes, int k, std::span<double> u) {
    for (std::size_t b = 0; b < bnodes.size(); ++b) u[bnodes[b]] = spec.lateral_at(k, b);
}

template <class Forcing>
SpaceTimeField march(const ScenarioSpec& spec, const RegularizationSchedule& sched, Forcing&& forcing,
                     bool nonlinear, SolveStats* stats) {
    const Grid& g = spec.grid;
    const std::size_t npl = g.nodes_per_level();
    const double ht = g.ht();
    const auto bnodes = g.boundary_nodes();
    std::vector<bool> is_boundary(npl, false);
    for (auto s : bnodes) is_boundary[s] = true;

    SpaceTimeField u(g);
    std::copy(spec.initial.begin(), spec.initial.end(), u.level(0).begin());
    ImplicitDiffusion op(g);
    std::vector<double> rhs(npl, 0.0), f(npl, 0.0), fnew(npl, 0.0), next(npl, 0.0);
    SolveStats local;

    for (int k = 1; k < g.nt; ++k) {
        const auto old = u.level(k - 1);
        auto cur = u.level(k);
        std::copy(old.begin(), old.end(), cur.begin());
        set_boundary(spec, bnodes, k, cur);
        std::fill(f.begin(), f.end(), 0.0);
        if (!nonlinear)
            for (std::size_t s = 0; s < npl; ++s) f[s] = forcing(0.0);
        for (std::size_t s = 0; s < npl; ++s) rhs[s] = old[s] + ht * f[s];
        local.linear_iterations += op.solve(rhs, cur);
        if (!nonlinear) continue;

        int it = 0;
        for (;;) {
            bool same = true;
            for (std::size_t s = 0; s < npl; ++s) {
                fnew[s] = is_boundary[s] ? 0.0 : forcing(cur[s]);
                same = same && fnew[s] == f[s];
            }
            if (same) break;
            if (++it > sched.max_picard) {
                std::ostringstream os;
                os << "Picard iteration exceeded max_picard=" << sched.max_picard << " at level " << k;
                double change = 0.0;
                for (std::size_t s = 0; s < npl; ++s) change = std::max(change, std::abs(fnew[s] - f[s]) * ht);
                throw PicardError(os.str(), change, k, std::vector<double>(cur.begin(), cur.end()));
            }
            std::copy(cur.begin(), cur.end(), next.begin());
            for (std::size_t s = 0; s < npl; ++s) rhs[s] = old[s] + ht * fnew[s];
            local.linear_iterations += op.solve(rhs, next);
            double change = 0.0, scale = 1.0;
            for (std::size_t s = 0; s < npl; ++s) {
                change = std::max(change, std::abs(next[s] - cur[s]));
                scale = std::max(scale, std::abs(next[s]));
            }
            std::copy(next.begin(), next.end(), cur.begin());
            f.swap(fnew);
            if (change < sched.picard_tol * scale) break;
        }
        local.picard_iterations += it;
        local.max_picard_per_level = std::max(local.max_picard_per_level, it);
    }
    if (stats) *stats = local;
    return u;
}

}  // namespace

SpaceTimeField solve_regularized(const ScenarioSpec& spec, double eps, const RegularizationSchedule& sched,
                                 SolveStats* stats) {
    if (!(eps > 0.0)) throw ParameterError("solve_regularized: eps must be positive");
    spec.validate();
    sched.validate();
    SolveStats local;
    SpaceTimeField u = march(spec, sched, [eps](double v) { return f_eps(v, eps); }, true, &local);
    local.step_to_eps_ratio = spec.grid.ht() / eps;
    if (stats) *stats = local;
    return u;
}

SpaceTimeField solve_forced(const ScenarioSpec& spec, double forcing) {
    spec.validate();
    RegularizationSchedule sched = RegularizationSchedule::default_schedule();
    return march(spec, sched, [forcing](double) { return forcing; }, false, nullptr);
}

SpaceTimeField indicator_positive(const SpaceTimeField& u) {
    SpaceTimeField chi(u.grid());
    auto in = u.values();
    auto out = chi.values();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? 1.0 : 0.0;
    return chi;
}

SpaceTimeField equation_residual(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    SpaceTimeField res(g);
    std::vector<double> lap(g.nodes_per_level());
    const double ht = g.ht();
    for (int k = 1; k < g.nt; ++k) {
        laplacian_level(g, u.level(k), lap);
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            if (g.on_spatial_boundary(s)) continue;
            const double chi = u.at(k, s) > 0.0 ? 1.0 : 0.0;
            res.at(k, s) = (u.at(k, s) - u.at(k - 1, s)) / ht - lap[s] - chi;
        }
    }
    return res;
}

ResidualStats residual_away_from_interface(const SpaceTimeField& u, double band, ResidualSide side) {
    const Grid& g = u.grid();
    const SpaceTimeField res = equation_residual(u);
    ResidualStats out;
    const int n = g.nx;
    for (int k = 1; k < g.nt; ++k)
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            if (g.on_spatial_boundary(s)) continue;
            std::size_t stencil[6];
            int m = 0;
            stencil[m++] = s;
            stencil[m++] = s - 1;
            stencil[m++] = s + 1;
            if (g.dim == 2) {
                stencil[m++] = s - n;
                stencil[m++] = s + n;
            }
            bool all_pos = u.at(k - 1, s) > band, all_nonpos = u.at(k - 1, s) <= 0.0;
            for (int q = 0; q < m; ++q) {
                const double v = u.at(k, stencil[q]);
                all_pos = all_pos && v > band;
                all_nonpos = all_nonpos && v <= 0.0;
            }
            if (all_pos && side == ResidualSide::nonpositive) continue;
            if (all_nonpos && side == ResidualSide::positive) continue;
            if (!all_pos && !all_nonpos) continue;
            out.max_abs = std::max(out.max_abs, std::abs(res.at(k, s)));
            ++out.nodes_checked;
            (all_pos ? out.positive_nodes : out.nonpositive_nodes)++;
        }
    return out;
}

LeastSolutionResult least_solution(const ScenarioSpec& spec, const RegularizationSchedule& sched, bool keep_all) {
    sched.validate();
    if (sched.eps_values.size() < 2) throw InvalidInput("least_solution: schedule needs at least 2 eps values");
    auto result = std::make_shared<LeastSolutionResult>();
    SpaceTimeField prev;
    for (std::size_t k = 0; k < sched.eps_values.size(); ++k) {
        const double eps = sched.eps_values[k];
        SolveStats st;
        SpaceTimeField cur = solve_regularized(spec, eps, sched, &st);
        result->stats.push_back(st);
        result->eps_used.push_back(eps);
        if (k > 0) {
            double sup = 0.0, mn = std::numeric_limits<double>::infinity();
            std::size_t worst = 0;
            const auto a = cur.values();
            const auto b = prev.values();
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - b[i];
                sup = std::max(sup, std::abs(d));
                if (d < mn) {
                    mn = d;
                    worst = i;
                }
            }
            if (mn < -kEpsMonotoneTol) {
                const std::size_t npl = spec.grid.nodes_per_level();
                std::ostringstream os;
                os << "least_solution: eps-monotonicity violated by " << -mn << " at level " << worst / npl
                   << ", node " << worst % npl << " (eps " << sched.eps_values[k - 1] << " -> " << eps << ")";
                throw MonotonicityError(os.str(), static_cast<int>(worst / npl), worst % npl, -mn);
            }
            result->tail_sup_diffs.push_back(sup);
            result->tail_min_diffs.push_back(mn);
        }
        if (keep_all) result->per_eps_solutions.push_back(cur);
        prev = std::move(cur);
        if (k > 0 && result->tail_sup_diffs.back() < sched.stop_tol) {
            result->converged = true;
            break;
        }
    }
    result->u = std::move(prev);
    result->chi = indicator_positive(result->u);
    result->residual = equation_residual(result->u);
    if (!result->converged) {
        std::ostringstream os;
        os << "least_solution: schedule exhausted; tail sup-differences:";
        for (double d : result->tail_sup_diffs) os << ' ' << d;
        throw LeastSolutionNotConverged(os.str(), result);
    }
    return std::move(*result);
}

TimeMonotonicityReport check_time_monotonicity(const SpaceTimeField& u, double c, double tol, bool positive_only) {
    const Grid& g = u.grid();
    TimeMonotonicityReport rep;
    rep.c = c;
    rep.tol = tol;
    rep.min_slope = std::numeric_limits<double>::infinity();
    const double ht = g.ht();
    for (int k = 0; k + 1 < g.nt; ++k)
        for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
            if (positive_only && !(u.at(k, s) > 0.0 && u.at(k + 1, s) > 0.0)) continue;
            const double slope = (u.at(k + 1, s) - u.at(k, s)) / ht;
            if (slope < rep.min_slope) {
                rep.min_slope = slope;
                rep.argmin_level = k;
                rep.argmin_node = s;
            }
        }
    rep.pass = rep.min_slope >= c - tol;
    return rep;
}

}  // namespace ufb
