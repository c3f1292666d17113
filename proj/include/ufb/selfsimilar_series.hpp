#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ufb/grid.hpp"

namespace ufb {

/// Initial slope of the outer profile at sqrt(2): `literal` uses f'(sqrt 2) = c,
/// `matched` uses sqrt(2) c, the one-sided slope of the inner profile.
enum class SlopeConvention { literal, matched };
const char* to_string(SlopeConvention s);

inline constexpr long double kSqrt2L = 1.41421356237309504880168872420969808L;
inline constexpr double kSqrt2D = static_cast<double>(kSqrt2L);

/// Taylor coefficients of the outer profile about sqrt(2), in long double.
struct SeriesSolution {
    double c = 0.0;
    SlopeConvention slope = SlopeConvention::literal;
    int N = 0;
    std::vector<long double> coeffs;     // a_0 .. a_N
    long double recursion_residual = 0;  // max relative residual over n in [1, N-2]
    int first_nonnegative = -1;          // smallest n >= 3 with a_n >= 0, or -1

    bool signs_ok() const { return first_nonnegative < 0; }
};

/// a_0 = 0, a_1 = slope, a_2 = (sqrt2/2 a_1 - 1)/2, then the three-term recursion.
/// Throws ParameterError for c <= 0 or N < 4.
SeriesSolution series_coefficients(double c, int N, SlopeConvention slope = SlopeConvention::literal);

struct SeriesValue {
    double value = 0.0;
    double error = 0.0;  // 10 |first omitted term|
    bool flagged = false;
};

/// Horner evaluation at x - sqrt(2). Throws ParameterError for x < sqrt(2).
SeriesValue evaluate_series(const SeriesSolution& s, double x, double tol = 1e-6);

/// Outer profile sampled by RK4 on -f'' + x f'/2 - f = 1 from sqrt(2).
struct OuterProfile {
    double c = 0.0;
    SlopeConvention slope = SlopeConvention::literal;
    double h = 0.0;
    std::vector<double> x, f, df;

    double x_max() const { return x.back(); }
    /// Cubic Hermite interpolation between samples. Throws DomainError outside.
    double value(double xq) const;
    double derivative(double xq) const;
};

/// Throws ParameterError unless 0 < h <= 1e-3 and x_max > sqrt(2), and
/// NumericError (carrying the last finite x) on overflow.
OuterProfile ode_integrate(double c, double x_max, double h = 1e-3, SlopeConvention slope = SlopeConvention::literal);

struct NegativityResult {
    bool confirmed = false;
    double x_zero = 0.0;  // first zero after sqrt(2), to 1e-8
    double f_max = 0.0;   // largest value before x_zero
    std::string verdict;
};

NegativityResult negativity_finder(double c, double x_max, SlopeConvention slope = SlopeConvention::literal,
                                   double h = 1e-3);

struct ConvergenceWindow {
    double x_hi = 0.0;      // series and ODE agree to tol on [sqrt2, x_hi]
    double max_diff = 0.0;  // over that window
    std::size_t samples = 0;
};

/// Walks the ODE samples outward from sqrt(2) and stops at the first sample
/// where the series differs by more than tol or flags its own error.
ConvergenceWindow convergence_window(const SeriesSolution& s, const OuterProfile& p, double tol = 1e-6);

/// Even profile: c(-1 + x^2/2) for |x| <= sqrt2, the outer profile beyond.
struct ProfilePair {
    SeriesSolution series;
    OuterProfile outer;
    ConvergenceWindow window;

    double c() const { return series.c; }
    double inner(double x) const { return 0.5 * series.c * (x - kSqrt2D) * (x + kSqrt2D); }
    /// Series inside the convergence window, ODE otherwise.
    double value(double x) const;
    /// u(x, t) = -t f(x / sqrt(-t)) for t < 0.
    double u(double x, double t) const;
};

ProfilePair make_profile_pair(double c, double x_max, SlopeConvention slope = SlopeConvention::literal,
                              int N = 200, double h = 1e-3);

struct ReconstructionReport {
    double residual_inner = 0.0;  // max |u_t - u_xx| where |x| < sqrt(2 (-t)) - band
    double residual_outer = 0.0;  // max |u_t - u_xx - 1| where |x| > sqrt(2 (-t)) + band
    std::size_t nodes_inner = 0, nodes_outer = 0;
    double homogeneity_defect = 0.0;  // max |u(rx, r^2 t) - r^2 u(x, t)| over r in {1/2, 2}
};

/// Samples u on g (which must have t < 0 everywhere) and checks the
/// piecewise equation with centred differences.
ReconstructionReport reconstruction_check(const ProfilePair& p, const Grid& g, double band);

void write_coefficients_csv(std::ostream& os, const SeriesSolution& s);
/// Columns x, f, source (inner, series or ode) on [0, x_max] with step dx.
void write_profile_csv(std::ostream& os, const ProfilePair& p, double dx);

}  // namespace ufb
