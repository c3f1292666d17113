#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ufb/errors.hpp"

namespace ufb {

/// Uniform space-time grid over the box [a,b]^dim x [t0,t1].
///
/// Spatial nodes are stored row-major with the last coordinate fastest; in
/// 2D the last coordinate is the x_n direction used by the hodograph module.
struct Grid {
    int dim = 1;
    double a = -1.0;
    double b = 1.0;
    int nx = 3;
    double t0 = 0.0;
    double t1 = 1.0;
    int nt = 3;

    /// Validating constructor; throws InvalidInput on a degenerate grid.
    static Grid make(int dim, double a, double b, int nx, double t0, double t1, int nt);

    double hx() const { return (b - a) / (nx - 1); }
    double ht() const { return (t1 - t0) / (nt - 1); }
    double parabolic_ratio() const { return ht() / (hx() * hx()); }

    double x(int i) const { return a + i * hx(); }
    double t(int k) const { return t0 + k * ht(); }

    std::size_t nodes_per_level() const {
        return dim == 1 ? static_cast<std::size_t>(nx) : static_cast<std::size_t>(nx) * nx;
    }
    std::size_t size() const { return nodes_per_level() * static_cast<std::size_t>(nt); }

    /// Spatial multi-index of a flat spatial index (i0 is the first coordinate).
    void unflatten(std::size_t s, int& i0, int& i1) const {
        if (dim == 1) {
            i0 = static_cast<int>(s);
            i1 = 0;
        } else {
            i0 = static_cast<int>(s / nx);
            i1 = static_cast<int>(s % nx);
        }
    }
    std::size_t flatten(int i0, int i1 = 0) const {
        return dim == 1 ? static_cast<std::size_t>(i0) : static_cast<std::size_t>(i0) * nx + i1;
    }

    /// Coordinates of spatial node s, written into out[0..dim).
    void coords(std::size_t s, double* out) const {
        int i0 = 0, i1 = 0;
        unflatten(s, i0, i1);
        out[0] = x(i0);
        if (dim == 2) out[1] = x(i1);
    }

    bool on_spatial_boundary(std::size_t s) const {
        int i0 = 0, i1 = 0;
        unflatten(s, i0, i1);
        if (i0 == 0 || i0 == nx - 1) return true;
        return dim == 2 && (i1 == 0 || i1 == nx - 1);
    }

    /// Flat spatial indices of all boundary nodes, in increasing order.
    std::vector<std::size_t> boundary_nodes() const;

    bool same_shape(const Grid& o) const {
        return dim == o.dim && nx == o.nx && nt == o.nt && a == o.a && b == o.b && t0 == o.t0 &&
               t1 == o.t1;
    }
};

/// Scalar samples on a Grid, indexed (time level, spatial node).
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    explicit SpaceTimeField(Grid g, double fill = 0.0) : grid_(g), values_(g.size(), fill) {}
    SpaceTimeField(Grid g, std::vector<double> values);

    /// Samples f(x, t) (x has grid.dim entries) on every node.
    template <class F>
    static SpaceTimeField sample(const Grid& g, F&& f) {
        SpaceTimeField u(g);
        double xs[2] = {0.0, 0.0};
        for (int k = 0; k < g.nt; ++k) {
            const double t = g.t(k);
            for (std::size_t s = 0; s < g.nodes_per_level(); ++s) {
                g.coords(s, xs);
                u.at(k, s) = f(xs, t);
            }
        }
        return u;
    }

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double& at(int k, std::size_t s) { return values_[k * grid_.nodes_per_level() + s]; }
    double at(int k, std::size_t s) const { return values_[k * grid_.nodes_per_level() + s]; }

    std::span<double> level(int k) {
        return {values_.data() + k * grid_.nodes_per_level(), grid_.nodes_per_level()};
    }
    std::span<const double> level(int k) const {
        return {values_.data() + k * grid_.nodes_per_level(), grid_.nodes_per_level()};
    }

    bool all_finite() const;
    double sup_abs() const;

    /// Copy of levels k0..k1 (inclusive) on the matching sub-grid.
    SpaceTimeField time_window(int k0, int k1) const;

    /// Multilinear interpolation at an arbitrary (x, t); throws DomainError outside the grid.
    double interpolate(const double* x, double t) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

}  // namespace ufb
