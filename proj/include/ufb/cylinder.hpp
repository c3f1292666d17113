#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

/// Q_r(x,t) = {(y,s) : |x-y| + |t-s|^{1/2} < r}, open in both past and future.
struct ParabolicCylinder {
    std::array<double, 2> center{0.0, 0.0};
    double t = 0.0;
    double r = 1.0;

    /// Parabolic distance |x-y| + |t-s|^{1/2} from the center.
    double distance(const double* y, double s, int dim) const {
        double d2 = 0.0;
        for (int i = 0; i < dim; ++i) d2 += (y[i] - center[i]) * (y[i] - center[i]);
        return std::sqrt(d2) + std::sqrt(std::abs(s - t));
    }
    bool contains(const double* y, double s, int dim) const { return distance(y, s, dim) < r; }
};

struct GridNode {
    int k;          // time level
    std::size_t s;  // flat spatial index
};

/// Grid nodes inside a cylinder. `empty_flagged` is set when the region misses every node.
struct RegionNodes {
    std::vector<GridNode> nodes;
    bool empty_flagged = false;
    std::size_t size() const { return nodes.size(); }
};

/// Nodes of g inside the region; visits only the bounding box of the cylinder.
RegionNodes restrict(const Grid& g, const ParabolicCylinder& region);

}  // namespace ufb
