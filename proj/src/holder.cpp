#include "ufb/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace ufb {

std::string_view to_string(HolderMode m) {
    switch (m) {
        case HolderMode::isotropic: return "isotropic";
        case HolderMode::parabolic: return "parabolic";
        case HolderMode::parabolic_distance: return "parabolic_distance";
    }
    return "?";
}

double holder_denominator(const double* x, double t, const double* y, double s, int dim,
                          double alpha, HolderMode mode) {
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double dx = std::sqrt(d2);
    const double dt = std::abs(t - s);
    switch (mode) {
        case HolderMode::isotropic: return std::pow(d2 + dt * dt, alpha / 2.0);
        case HolderMode::parabolic: return std::pow(dx, alpha) + std::pow(dt, alpha / 2.0);
        case HolderMode::parabolic_distance: return std::pow(dx + std::sqrt(dt), alpha);
    }
    return 1.0;
}

namespace {

struct Point {
    double x[2];
    double t;
    double v;
};

}  // namespace

HolderNorm discrete_holder_norm(const SpaceTimeField& u, double alpha,
                                const ParabolicCylinder& region, HolderMode mode) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("discrete_holder_norm: alpha must lie in (0,1]");
    const Grid& g = u.grid();
    const RegionNodes rn = restrict(g, region);
    if (rn.size() < 2) throw InvalidInput("discrete_holder_norm: region contains fewer than 2 grid nodes");

    std::vector<Point> pts(rn.size());
    HolderNorm out;
    for (std::size_t p = 0; p < rn.size(); ++p) {
        g.coords(rn.nodes[p].s, pts[p].x);
        pts[p].t = g.t(rn.nodes[p].k);
        pts[p].v = u.at(rn.nodes[p].k, rn.nodes[p].s);
        out.sup = std::max(out.sup, std::abs(pts[p].v));
    }
    out.nodes = pts.size();

    auto quotient = [&](std::size_t i, std::size_t j) {
        const double den = holder_denominator(pts[i].x, pts[i].t, pts[j].x, pts[j].t, g.dim, alpha, mode);
        return den > 0.0 ? std::abs(pts[i].v - pts[j].v) / den : 0.0;
    };

    const std::size_t n = pts.size();
    if (n <= kExhaustiveNodeLimit) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) out.seminorm = std::max(out.seminorm, quotient(i, j));
        out.pairs = n * (n - 1) / 2;
    } else {
        out.exhaustive = false;
        // Nearest neighbours in every grid direction.
        std::unordered_map<std::size_t, std::size_t> lookup;
        lookup.reserve(n * 2);
        const std::size_t npl = g.nodes_per_level();
        for (std::size_t p = 0; p < n; ++p) lookup.emplace(rn.nodes[p].k * npl + rn.nodes[p].s, p);
        const std::size_t steps[3] = {npl, 1, static_cast<std::size_t>(g.nx)};
        const int nsteps = g.dim == 1 ? 2 : 3;
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t key = rn.nodes[p].k * npl + rn.nodes[p].s;
            for (int d = 0; d < nsteps; ++d) {
                auto it = lookup.find(key + steps[d]);
                if (it != lookup.end()) {
                    out.seminorm = std::max(out.seminorm, quotient(p, it->second));
                    ++out.pairs;
                }
            }
        }
        // Stratified anchors, partners from a fixed-seed generator.
        std::mt19937_64 rng(0x5eed5eedULL);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t q = 0; q < kSampledPairs; ++q) {
            const std::size_t i = q * n / kSampledPairs;
            const std::size_t j = pick(rng);
            if (i != j) out.seminorm = std::max(out.seminorm, quotient(i, j));
        }
        out.pairs += kSampledPairs;
    }
    out.norm = out.sup + out.seminorm;
    return out;
}

}  // namespace ufb
