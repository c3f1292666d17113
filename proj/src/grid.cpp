#include "ufb/grid.hpp"

#include <algorithm>
#include <sstream>

namespace ufb {

Grid Grid::make(int dim, double a, double b, int nx, double t0, double t1, int nt) {
    std::ostringstream why;
    if (dim != 1 && dim != 2) why << "spatial_dim must be 1 or 2, got " << dim;
    else if (nx < 3) why << "nx must be >= 3, got " << nx;
    else if (nt < 3) why << "nt must be >= 3, got " << nt;
    else if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) why << "empty spatial extent";
    else if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) why << "empty time interval";
    if (!why.str().empty()) throw InvalidInput("Grid: " + why.str());
    Grid g{dim, a, b, nx, t0, t1, nt};
    if (!std::isfinite(g.parabolic_ratio())) throw InvalidInput("Grid: parabolic ratio not finite");
    return g;
}

std::vector<std::size_t> Grid::boundary_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < nodes_per_level(); ++s)
        if (on_spatial_boundary(s)) out.push_back(s);
    return out;
}

SpaceTimeField::SpaceTimeField(Grid g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw InvalidInput("SpaceTimeField: value count " + std::to_string(values_.size()) +
                           " does not match grid size " + std::to_string(grid_.size()));
}

SpaceTimeField SpaceTimeField::time_window(int k0, int k1) const {
    const Grid& g = grid_;
    if (k0 < 0 || k1 >= g.nt || k1 - k0 < 2) throw InvalidInput("time_window: level range out of bounds or too short");
    const Grid w = Grid::make(g.dim, g.a, g.b, g.nx, g.t(k0), g.t(k1), k1 - k0 + 1);
    SpaceTimeField out(w);
    for (int k = k0; k <= k1; ++k) std::copy(level(k).begin(), level(k).end(), out.level(k - k0).begin());
    return out;
}

bool SpaceTimeField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double SpaceTimeField::sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Locates coordinate q on a uniform axis; returns the left cell index and weight.
bool locate(double q, double lo, double h, int n, int& i, double& w) {
    const double hi = lo + h * (n - 1);
    const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (q < lo - slack || q > hi + slack) return false;
    double p = (std::clamp(q, lo, hi) - lo) / h;
    i = std::min(static_cast<int>(std::floor(p)), n - 2);
    w = p - i;
    return true;
}

}  // namespace

double SpaceTimeField::interpolate(const double* x, double t) const {
    const Grid& g = grid_;
    int ix0 = 0, ix1 = 0, it = 0;
    double wx0 = 0.0, wx1 = 0.0, wt = 0.0;
    bool ok = locate(x[0], g.a, g.hx(), g.nx, ix0, wx0) && locate(t, g.t0, g.ht(), g.nt, it, wt);
    if (ok && g.dim == 2) ok = locate(x[1], g.a, g.hx(), g.nx, ix1, wx1);
    if (!ok) {
        std::ostringstream os;
        os << "interpolate: point (" << x[0];
        if (g.dim == 2) os << ", " << x[1];
        os << "; t=" << t << ") outside grid";
        throw DomainError(os.str());
    }
    auto spatial = [&](int k) {
        if (g.dim == 1)
            return (1 - wx0) * at(k, g.flatten(ix0)) + wx0 * at(k, g.flatten(ix0 + 1));
        return (1 - wx0) * ((1 - wx1) * at(k, g.flatten(ix0, ix1)) + wx1 * at(k, g.flatten(ix0, ix1 + 1))) +
               wx0 * ((1 - wx1) * at(k, g.flatten(ix0 + 1, ix1)) +
                      wx1 * at(k, g.flatten(ix0 + 1, ix1 + 1)));
    };
    return (1 - wt) * spatial(it) + wt * spatial(it + 1);
}

}  // namespace ufb
