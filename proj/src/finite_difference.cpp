#include "ufb/finite_difference.hpp"

#include <cmath>

namespace ufb {

namespace {

// Strided 1D line inside one time level along `axis`.
struct Line {
    std::size_t start;
    std::size_t stride;
};

template <class F>
void for_each_line(const Grid& g, int axis, F&& f) {
    const std::size_t n = static_cast<std::size_t>(g.nx);
    if (g.dim == 1) {
        f(Line{0, 1});
    } else if (axis == 0) {
        for (std::size_t j = 0; j < n; ++j) f(Line{j, n});
    } else {
        for (std::size_t i = 0; i < n; ++i) f(Line{i * n, 1});
    }
}

void first_derivative_line(const double* in, double* out, Line l, int n, double h) {
    auto v = [&](int i) { return in[l.start + i * l.stride]; };
    auto o = [&](int i) -> double& { return out[l.start + i * l.stride]; };
    o(0) = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    for (int i = 1; i < n - 1; ++i) o(i) = (v(i + 1) - v(i - 1)) / (2.0 * h);
    o(n - 1) = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h);
}

void second_derivative_line(const double* in, double* out, Line l, int n, double h) {
    auto v = [&](int i) { return in[l.start + i * l.stride]; };
    auto o = [&](int i) -> double& { return out[l.start + i * l.stride]; };
    const double h2 = h * h;
    for (int i = 1; i < n - 1; ++i) o(i) = (v(i + 1) - 2.0 * v(i) + v(i - 1)) / h2;
    if (n >= 4) {
        o(0) = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / h2;
        o(n - 1) = (2.0 * v(n - 1) - 5.0 * v(n - 2) + 4.0 * v(n - 3) - v(n - 4)) / h2;
    } else {
        o(0) = o(1);
        o(n - 1) = o(n - 2);
    }
}

}  // namespace

void diff_axis(const Grid& g, std::span<const double> level, int axis, std::span<double> out) {
    for_each_line(g, axis, [&](Line l) { first_derivative_line(level.data(), out.data(), l, g.nx, g.hx()); });
}

void laplacian_level(const Grid& g, std::span<const double> level, std::span<double> out) {
    const double h2 = g.hx() * g.hx();
    const int n = g.nx;
    std::fill(out.begin(), out.end(), 0.0);
    if (g.dim == 1) {
        for (int i = 1; i < n - 1; ++i) out[i] = (level[i + 1] - 2.0 * level[i] + level[i - 1]) / h2;
        return;
    }
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j) {
            const std::size_t s = g.flatten(i, j);
            out[s] = (level[s + n] + level[s - n] + level[s + 1] + level[s - 1] - 4.0 * level[s]) / h2;
        }
}

double DerivativeBundle::grad_norm(int k, std::size_t s) const {
    double acc = 0.0;
    for (const auto& gi : grad) acc += gi.at(k, s) * gi.at(k, s);
    return std::sqrt(acc);
}

double DerivativeBundle::laplacian(int k, std::size_t s) const {
    const int dim = static_cast<int>(grad.size());
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) acc += hess[i * dim + i].at(k, s);
    return acc;
}

DerivativeBundle finite_differences(const SpaceTimeField& u) {
    if (!u.all_finite()) throw InvalidInput("finite_differences: field contains non-finite values");
    const Grid& g = u.grid();
    const int dim = g.dim;
    DerivativeBundle b;
    b.grad.assign(dim, SpaceTimeField(g));
    b.hess.assign(dim * dim, SpaceTimeField(g));
    b.ut = SpaceTimeField(g);

    const double h = g.hx();
    for (int k = 0; k < g.nt; ++k) {
        const auto lvl = u.level(k);
        for (int i = 0; i < dim; ++i) {
            for_each_line(g, i, [&](Line l) {
                first_derivative_line(lvl.data(), b.grad[i].level(k).data(), l, g.nx, h);
                second_derivative_line(lvl.data(), b.hess[i * dim + i].level(k).data(), l, g.nx, h);
            });
        }
        if (dim == 2) {
            auto mixed = b.hess[1].level(k);
            for_each_line(g, 0, [&](Line l) {
                first_derivative_line(b.grad[1].level(k).data(), mixed.data(), l, g.nx, h);
            });
            std::copy(mixed.begin(), mixed.end(), b.hess[2].level(k).begin());
        }
    }

    const double ht = g.ht();
    const std::size_t npl = g.nodes_per_level();
    for (int k = 0; k < g.nt; ++k) {
        const int lo = k < g.nt - 1 ? k : k - 1;
        for (std::size_t s = 0; s < npl; ++s) b.ut.at(k, s) = (u.at(lo + 1, s) - u.at(lo, s)) / ht;
    }
    return b;
}

}  // namespace ufb
