#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "ufb/cylinder.hpp"
#include "ufb/grid.hpp"

namespace ufb {

/// Scales attached to a free-boundary point with |grad u| > 0:
/// r^alpha = |grad u| / M and rho^{1-gamma} = |grad u| / M.
struct RescaleParams {
    std::array<double, 2> center{0.0, 0.0};
    double t = 0.0;
    double M = 20.0;
    double alpha = 0.5;
    double gamma = 0.25;
    double grad_norm = 0.0;
    double r = 0.0;
    double rho = 0.0;

    /// Throws ParameterError unless M > 1, 0 < alpha < 1, 0 < gamma < 1 - alpha, grad_norm > 0.
    static RescaleParams make(std::array<double, 2> center, double t, double grad_norm, double M = 20.0,
                              double alpha = 0.5, double gamma = 0.25);
};

/// |grad u| at (x, t) by multilinear interpolation of the central-difference gradient.
double interpolated_grad_norm(const SpaceTimeField& u, const double* x, double t);

/// u_r(y, s) = u(x + r R y, t + r^2 s) / (|grad u(x,t)| r) sampled on
/// [-1,1]^dim x [-1,1], with R the Householder reflection taking grad u(x,t)
/// to e_n (a sign flip in 1D).
///
/// Derivatives of u_r are carried alongside, obtained by the chain rule from
/// finite differences of the native field and interpolated, never by
/// differencing the resampled field.
struct RescaledField {
    RescaleParams params;
    std::array<double, 4> rotation{1, 0, 0, 1};  // row-major dim x dim
    SpaceTimeField ur;
    std::vector<SpaceTimeField> grad;
    SpaceTimeField ut;
    SpaceTimeField lap;
    double rhs_factor = 0.0;    // r^{1-alpha} / M, the forcing of the rescaled equation
    double disc_tol = 0.0;      // hx sup|D^2 u| / |grad u(x,t)| over the sampled region
    double q5_residual = 0.0;   // max |(d_s - Delta_y) u_r - rhs_factor chi| at native nodes away from the interface
    std::size_t q5_nodes = 0;
};

/// Throws DomainError if Q_{2r}(x,t) leaves the grid and InvalidInput if grad u(x,t) = 0.
/// n_out is the spatial and temporal node count of the output grid.
RescaledField rescale(const SpaceTimeField& u, const RescaleParams& p, int n_out = 65);

struct RescaleReport {
    double tol = 0.0;        // 0.5 / M + disc_tol
    double q1_error = 0.0;   // |grad u_r(0,0) - e_n|
    double q2_min = 0.0, q2_max = 0.0;
    double q3_max = 0.0;     // max |d_i u_r|, i < n (0 in 1D)
    double q4_max = 0.0;     // max |u_r|
    double q5_residual = 0.0;
    bool q1 = false, q2 = false, q3 = false, q4 = false, q5 = false;
    std::size_t nodes = 0;   // rescaled nodes inside Q_1

    bool all() const { return q1 && q2 && q3 && q4 && q5; }
};

/// Checks the five rescaling properties on the nodes of Q_1.
RescaleReport verify_rescale_properties(const RescaledField& rf);

/// v(x', x_n, t) with u(x', v, t) = x_n, on the grid of the input field.
struct HodographField {
    SpaceTimeField v;
    std::vector<unsigned char> valid;  // per node; x_n outside the column's range is invalid
    double delta = 0.0;
    double roundtrip = 0.0;            // max |u(x', v, t) - x_n| over valid nodes
};

/// Inverts each (x', t) column of the piecewise-linear interpolant along the
/// last axis. Throws InvalidInput naming the node if a column difference
/// quotient falls below delta.
HodographField hodograph_transform(const SpaceTimeField& ur, double delta);

struct IdentityResiduals {
    std::array<double, 6> max_abs{};  // the six derivative relations, in the order documented in the README
    std::size_t nodes = 0;
    double worst() const;
};

/// Residuals of the first- and second-order relations between the
/// derivatives of u (at (x', v, t)) and of v (at (x', x_n, t)), over valid
/// interior nodes whose 3x3 neighbourhood and next time level are valid.
IdentityResiduals derivative_identities(const SpaceTimeField& ur, const HodographField& h);

struct CoefficientMatrix {
    int n = 1;                               // matrix size (= spatial dimension)
    std::vector<std::size_t> nodes;          // flat indices into the field
    std::vector<std::array<double, 4>> A;    // row-major n x n
    double lambda_min = 0.0, lambda_max = 0.0;
};

/// Builds A(grad v) at the same nodes as derivative_identities. Throws
/// InvalidInput naming the node if v_n <= 0.
CoefficientMatrix coefficient_matrix(const HodographField& h);

/// A(grad v) at one node from (v_1, ..., v_n).
std::array<double, 4> coefficient_matrix_at(const double* grad_v, int n);
/// Eigenvalues (min, max) of a symmetric 1x1 or 2x2 matrix.
std::array<double, 2> symmetric_eigen_bounds(const std::array<double, 4>& A, int n);

/// Eigenvalue range of A implied by 1 - 1/M <= u_n <= 1 + 1/M and |u_i| <= 2/M
/// (interval arithmetic and Gershgorin discs).
std::array<double, 2> ellipticity_envelope(double M, int n);

struct UtHolderReport {
    double alpha = 0.0;
    double min_grad = 0.0;     // min |grad u| over the full cylinder
    double seminorm_half = 0.0;
    double norm_half = 0.0;    // C^alpha norm of u_t on the half cylinder
    double sup_full = 0.0;     // sup |u_t| on the full cylinder
    double ratio = 0.0;        // norm_half / sup_full
    std::size_t nodes_half = 0;
};

/// u_t is the forward time difference. Throws InvalidInput if min |grad u| < delta.
UtHolderReport ut_holder_diagnostic(const SpaceTimeField& u, const ParabolicCylinder& q, double alpha, double delta);

struct ScalingLawReport {
    double M = 1.0, gamma = 0.25;
    std::vector<double> grads, rhos, sups;
    double slope = 0.0;      // of log sup |u_t| against log rho
    double fitted_C = 0.0;   // max over samples of sup / (M rho^{-gamma})
    bool pass = false;       // slope >= -gamma - 0.2
};

struct BoundaryPoint {
    std::array<double, 2> x{0.0, 0.0};
    double t = 0.0;
    double grad_norm = 0.0;
};

/// Points (x, H(x)) with |grad u| > 0; for each, rho^{1-gamma} = |grad u| / M and
/// sup |u_t| over Q_{rho/2} restricted to u > ht. Points whose rho/2 is below
/// 2 hx are skipped. Throws InvalidInput with fewer than 3 usable points.
ScalingLawReport scaling_law(const SpaceTimeField& u, const std::vector<BoundaryPoint>& points, double M,
                             double gamma);

/// One row per node: index, then the matrix entries.
void write_coefficient_csv(std::ostream& os, const CoefficientMatrix& cm);

}  // namespace ufb
