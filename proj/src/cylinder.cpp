#include "ufb/cylinder.hpp"

#include <algorithm>

namespace ufb {

namespace {

void index_range(double lo, double hi, double origin, double h, int n, int& first, int& last) {
    first = std::max(0, static_cast<int>(std::floor((lo - origin) / h)));
    last = std::min(n - 1, static_cast<int>(std::ceil((hi - origin) / h)));
}

}  // namespace

RegionNodes restrict(const Grid& g, const ParabolicCylinder& region) {
    RegionNodes out;
    const double r = region.r;
    if (!(r > 0.0)) {
        out.empty_flagged = true;
        return out;
    }
    const bool unbounded = !std::isfinite(r);
    int k_lo = 0, k_hi = g.nt - 1;
    int x_lo[2] = {0, 0}, x_hi[2] = {g.nx - 1, g.nx - 1};
    if (!unbounded) {
        index_range(region.t - r * r, region.t + r * r, g.t0, g.ht(), g.nt, k_lo, k_hi);
        for (int d = 0; d < g.dim; ++d)
            index_range(region.center[d] - r, region.center[d] + r, g.a, g.hx(), g.nx, x_lo[d],
                        x_hi[d]);
    }
    double y[2] = {0.0, 0.0};
    for (int k = k_lo; k <= k_hi; ++k) {
        const double s = g.t(k);
        for (int i0 = x_lo[0]; i0 <= x_hi[0]; ++i0) {
            const int i1_lo = g.dim == 2 ? x_lo[1] : 0;
            const int i1_hi = g.dim == 2 ? x_hi[1] : 0;
            for (int i1 = i1_lo; i1 <= i1_hi; ++i1) {
                y[0] = g.x(i0);
                if (g.dim == 2) y[1] = g.x(i1);
                if (unbounded || region.contains(y, s, g.dim))
                    out.nodes.push_back({k, g.flatten(i0, i1)});
            }
        }
    }
    out.empty_flagged = out.nodes.empty();
    return out;
}

}  // namespace ufb
