#pragma once

#include <cstddef>
#include <string_view>

#include "ufb/cylinder.hpp"
#include "ufb/grid.hpp"

namespace ufb {

/// Denominator used for the difference quotients.
enum class HolderMode {
    isotropic,          // (|x-y|^2 + |t-s|^2)^{alpha/2}
    parabolic,          // |x-y|^alpha + |t-s|^{alpha/2}
    parabolic_distance  // (|x-y| + |t-s|^{1/2})^alpha
};

std::string_view to_string(HolderMode m);

struct HolderNorm {
    double norm = 0.0;       // sup + seminorm
    double sup = 0.0;        // sup |u| over the region
    double seminorm = 0.0;   // sup of difference quotients
    std::size_t nodes = 0;
    std::size_t pairs = 0;
    bool exhaustive = true;  // false when the pair set was subsampled
};

/// Exhaustive pair enumeration is used up to this many region nodes.
inline constexpr std::size_t kExhaustiveNodeLimit = 20000;
/// Size of the deterministic pair sample above the limit.
inline constexpr std::size_t kSampledPairs = 1000000;

/// Discrete Holder norm of u over the grid nodes inside `region`.
///
/// Above kExhaustiveNodeLimit nodes the seminorm is taken over all
/// nearest-neighbour pairs plus a stratified sample of kSampledPairs pairs
/// drawn from a fixed-seed generator, so results are reproducible.
/// alpha may equal 1. Throws InvalidInput if the region holds fewer than 2 nodes.
HolderNorm discrete_holder_norm(const SpaceTimeField& u, double alpha,
                                const ParabolicCylinder& region, HolderMode mode);

/// Difference-quotient denominator between two space-time points.
double holder_denominator(const double* x, double t, const double* y, double s, int dim,
                          double alpha, HolderMode mode);

}  // namespace ufb
