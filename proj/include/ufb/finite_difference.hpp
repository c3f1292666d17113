#pragma once

#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

/// Finite-difference derivatives of a SpaceTimeField.
///
/// Spatial first and second derivatives use second-order central stencils in
/// the interior and second-order one-sided stencils on the spatial boundary,
/// so any field quadratic in x is differentiated exactly. The time derivative
/// is the forward difference, switching to the backward difference on the
/// last level; it is exact for fields linear in t.
struct DerivativeBundle {
    std::vector<SpaceTimeField> grad;  // grad[i] = d/dx_i
    std::vector<SpaceTimeField> hess;  // hess[i * dim + j]
    SpaceTimeField ut;

    const SpaceTimeField& hessian(int i, int j, int dim) const { return hess[i * dim + j]; }
    /// |grad u| at node (k, s).
    double grad_norm(int k, std::size_t s) const;
    /// Delta u at node (k, s).
    double laplacian(int k, std::size_t s) const;
};

/// Throws InvalidInput if u holds non-finite values.
DerivativeBundle finite_differences(const SpaceTimeField& u);

/// Spatial-only first derivative along axis `axis` of one time level.
void diff_axis(const Grid& g, std::span<const double> level, int axis, std::span<double> out);

/// Discrete Laplacian of one time level (central stencil, interior nodes only; boundary left 0).
void laplacian_level(const Grid& g, std::span<const double> level, std::span<double> out);

}  // namespace ufb
