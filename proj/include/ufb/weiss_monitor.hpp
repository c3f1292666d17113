#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

/// Weight on max{u,0} in the energy: 1 as written in the definition, 2 as
/// used when the energy is differentiated.
enum class WeissVariant { paper_def, proof_2x };
std::string_view to_string(WeissVariant v);
std::optional<WeissVariant> parse_weiss_variant(std::string_view s);

/// G(x,t) = (4 pi (-t))^{-n/2} exp(-|x|^2 / (-4t)); throws ParameterError for t >= 0.
double backward_heat_kernel(const double* x, double t, int n);

/// Space-time point used as the origin of the strips T_r.
struct SpaceTimePoint {
    std::array<double, 2> x{0.0, 0.0};
    double t = 0.0;
};

struct WeissOptions {
    WeissVariant variant = WeissVariant::proof_2x;
    double rcut_factor = 12.0;  // R_cut = rcut_factor * sqrt(4 r^2)
};

struct WeissValue {
    double psi = 0.0;
    double psi_coarse = 0.0;        // same quadrature on every second node and level
    double kernel_mass_min = 1.0;   // smallest quadrature mass of G over the levels used
    bool domain_truncated = false;  // the domain cut the R_cut window
};

/// r^{-4} times the integral over T_r (relative to `origin`) of
/// (|grad u|^2 - k max{u,0} + u^2/t) G. Trapezoid in x over |x| <= R_cut,
/// and in t over the piecewise-linear interpolant of the level integrals,
/// partial end cells included. Throws DomainError if the strip leaves the
/// time range and ParameterError if r^2 < 4 ht.
WeissValue weiss_energy(const SpaceTimeField& u, const SpaceTimePoint& origin, double r, const WeissOptions& opt = {});

/// r^{-5} times the integral over T_r of (2t u_t + x.grad u - 2u)^2 G / (-t).
double weiss_derivative_formula(const SpaceTimeField& u, const SpaceTimePoint& origin, double r,
                                const WeissOptions& opt = {});

struct WeissDerivativeCheck {
    double r = 0.0, dr = 0.0;
    double fd = 0.0;       // (psi(r+dr) - psi(r-dr)) / (2 dr)
    double formula = 0.0;
    double rel_error = 0.0;
};

WeissDerivativeCheck weiss_derivative_check(const SpaceTimeField& u, const SpaceTimePoint& origin, double r, double dr,
                                            const WeissOptions& opt = {});

struct WeissCurve {
    WeissVariant variant = WeissVariant::proof_2x;
    std::vector<double> rs;            // decreasing
    std::vector<double> psi;
    std::vector<double> dpsi_fd;
    std::vector<double> dpsi_formula;
    std::vector<double> quad_error;    // |psi - psi_coarse|
    double kernel_mass_min = 1.0;
    bool domain_truncated = false;
    double min_slope = 0.0;            // min over rs of dpsi_fd
    bool monotone(double tol) const { return min_slope >= -tol; }
};

/// dr = dr_rel * r at each radius. rs are sorted into decreasing order.
WeissCurve weiss_curve(const SpaceTimeField& u, const SpaceTimePoint& origin, std::vector<double> rs,
                       const WeissOptions& opt = {}, double dr_rel = 0.02);

/// Columns r, psi, dpsi_fd, dpsi_formula, variant.
void write_weiss_csv(std::ostream& os, const WeissCurve& c);

/// sup |u(rx, r^2 t) - r^2 u(x,t)| / (1 + r^2 sup|u|) over grid nodes (x,t)
/// relative to the origin whose scaled image lies in the grid.
double homogeneity_defect(const SpaceTimeField& u, const SpaceTimePoint& origin, double r);

struct GrowthSeries {
    std::vector<double> rs;
    std::vector<double> S;       // sup over Q_r(origin) of u / r^2
    double max_over_min = 0.0;
    double log_slope = 0.0;      // of log S against log r
};

/// Throws DomainError if a cylinder's bounding box leaves the grid.
GrowthSeries growth_series(const SpaceTimeField& u, const SpaceTimePoint& origin, std::vector<double> rs);

}  // namespace ufb
