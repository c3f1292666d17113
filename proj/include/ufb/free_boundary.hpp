#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

/// The free boundary as a time graph t = H(x) over the spatial nodes.
///
/// H is the linear-in-time interpolation of the single transition from
/// u <= 0 to u > 0 in each spatial column. Columns with no transition inside
/// (t0, t1] are invalid and hold NaN.
struct FreeBoundaryGraph {
    Grid grid;
    std::vector<double> H;
    std::vector<std::array<double, 2>> gradH;  // NaN where no valid neighbour exists
    std::vector<unsigned char> valid;
    std::vector<int> lower_level;  // last level with u <= 0, -1 where invalid

    std::size_t valid_count() const;
    bool empty() const { return valid_count() == 0; }
};

/// Throws InvalidInput naming the column if u changes sign more than once
/// along it (positive, then back to <= 0). No transition anywhere gives an
/// empty graph. The caller is expected to have checked time monotonicity.
FreeBoundaryGraph extract_graph(const SpaceTimeField& u);

struct LipschitzReport {
    double lip = 0.0;      // max |H(y) - H(x)| / |x - y| over valid pairs
    double grad_sup = 0.0; // sup |grad u| over the window below
    double c = 0.0;
    double bound = 0.0;    // grad_sup / c
    double window_t0 = 0.0, window_t1 = 0.0;
    std::size_t pairs = 0;
    bool pass = false;     // lip <= 1.1 * bound
};

/// grad_sup is measured over every node with t <= max H + ht (the part of
/// the domain the graph can see). Throws InvalidInput on an empty graph.
LipschitzReport lipschitz_report(const FreeBoundaryGraph& g, const SpaceTimeField& u, double c);

/// Space-time normals of the boundary, taken from the positive side: the
/// gradient and the forward time difference at the first level above H.
struct NormalField {
    int dim = 1;
    std::vector<std::size_t> nodes;          // spatial node of each sample
    std::vector<std::array<double, 2>> x;
    std::vector<double> H;
    std::vector<std::array<double, 3>> nu;   // (grad u, u_t) / |.|, length dim + 1
    std::vector<double> grad_norm;
    std::vector<double> ut_plus;
    std::vector<double> theta;               // angle between nu and the time axis

    std::size_t size() const { return nodes.size(); }
};

/// Gauss map xi -> xi / |xi| applied to (grad u, u_t).
std::array<double, 3> gauss_map(const double* grad, int dim, double ut);

/// Samples whose positive side has fewer than two levels, or whose normal
/// vector vanishes, are dropped.
NormalField normal_field(const FreeBoundaryGraph& g, const SpaceTimeField& u);

struct NormalHolderReport {
    double alpha = 0.0;
    double seminorm = 0.0;      // sup |nu_x - nu_y| / |x - y|^{alpha/2}
    std::size_t pairs = 0;
    double cone_excess = 0.0;   // max of sin(theta) - |grad u| / sqrt(|grad u|^2 + c^2)
    bool cone_pass = false;     // cone_excess <= 1e-6
    double unit_defect = 0.0;   // max ||nu| - 1|
};

/// Throws InvalidInput with fewer than two samples.
NormalHolderReport normal_holder_report(const NormalField& nf, double alpha, double c);

enum class PinchingStatus { pass, fail, inconclusive };
std::string to_string(PinchingStatus s);

struct PinchingReport {
    PinchingStatus status = PinchingStatus::inconclusive;
    std::string reason;
    std::size_t x0 = 0;
    double grad_at_x0 = 0.0;
    double grad_tol = 0.0;
    double grad_seminorm = 0.0;        // C^{alpha,alpha/2} seminorm of grad u near (x0, H(x0))
    double grad_seminorm_coarse = 0.0; // same on the 2h-coarsened field
    std::vector<double> rhos;
    std::vector<double> sups;          // sup_{|y - x0| <= rho} |H(y) - H(x0)|
    double exponent = 0.0;             // least-squares slope of log sups vs log rhos
    double alpha = 0.0;
};

struct PinchingOptions {
    double probe_radius = 0.25;    // radius of the cylinder used for the gradient seminorm
    double coarse_ratio_max = 1.25;
    double exponent_slack = 0.15;
    int min_scales = 3;
};

/// Fits sup |H(y) - H(x0)| against rho over dyadic rho, from half the
/// valid radius around x0 down to 2 hx. x0 must be a critical point:
/// |grad u| (the larger one-sided difference at the bracketing levels) below
/// grad_tol = 10 * seminorm * hx^alpha, and the seminorm must not grow by
/// more than coarse_ratio_max when the field is coarsened by 2; otherwise
/// the status is inconclusive. Pass iff exponent >= 1 + alpha - slack.
PinchingReport pinching_check(const FreeBoundaryGraph& g, const SpaceTimeField& u, std::size_t x0, double alpha,
                              const PinchingOptions& opt = {});

/// Every second node in space and time; requires odd nx and nt.
SpaceTimeField coarsen2(const SpaceTimeField& u);

/// Columns: x (or x1,x2), H, gradH (per axis), grad_norm, ut_plus, theta.
/// Rows follow the normal field samples.
void write_boundary_csv(std::ostream& os, const FreeBoundaryGraph& g, const NormalField& nf);

}  // namespace ufb
