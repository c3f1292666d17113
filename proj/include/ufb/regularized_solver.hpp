#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ufb/errors.hpp"
#include "ufb/grid.hpp"
#include "ufb/scenario.hpp"

namespace ufb {

/// Piecewise-linear regularization of the Heaviside forcing:
/// 0 for x < 0, x/eps on [0, eps], 1 above. Throws ParameterError if eps <= 0.
double f_eps(double x, double eps);

struct RegularizationSchedule {
    std::vector<double> eps_values;  // strictly decreasing, positive
    double stop_tol = 1e-6;
    int max_picard = 5000;
    double picard_tol = 1e-12;

    /// eps_k = 0.1 * 2^-k, k = 0..12; stop_tol = 1e-6.
    static RegularizationSchedule default_schedule();
    void validate() const;
};

/// Thrown when the per-level Picard iteration misses picard_tol.
class PicardError : public ConvergenceError {
public:
    PicardError(const std::string& what, double last_change, int level, std::vector<double> last_iterate)
        : ConvergenceError(what, last_change), level_(level), last_iterate_(std::move(last_iterate)) {}
    int level() const noexcept { return level_; }
    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    int level_;
    std::vector<double> last_iterate_;
};

/// Statistics gathered by one regularized solve.
struct SolveStats {
    long picard_iterations = 0;
    int max_picard_per_level = 0;
    double step_to_eps_ratio = 0.0;  // ht / eps, reported rather than enforced
    long linear_iterations = 0;      // CG iterations (2D only)
};

/// Semi-implicit solve of u_t - Delta u = f_eps(u) with Dirichlet data psi.
///
/// Each step solves (I - ht Delta_h) u_new = u_old + ht f_eps(u*) with u*
/// updated by Picard iteration started from the f = 0 subsolution, so the
/// iterates increase monotonically to the least discrete fixed point. The
/// linear solve is a Thomas sweep in 1D and conjugate gradients in 2D
/// (residual below 1e-12 times the right-hand-side scale).
SpaceTimeField solve_regularized(const ScenarioSpec& spec, double eps, const RegularizationSchedule& sched,
                                 SolveStats* stats = nullptr);

/// Same discretization with the forcing replaced by a constant (the linear
/// forced heat equation u_t - Delta u = forcing).
SpaceTimeField solve_forced(const ScenarioSpec& spec, double forcing);

struct LeastSolutionResult {
    SpaceTimeField u;
    std::vector<SpaceTimeField> per_eps_solutions;  // filled only when keep_all was requested
    std::vector<double> eps_used;
    std::vector<double> tail_sup_diffs;  // sup |u^{eps_{k+1}} - u^{eps_k}|
    std::vector<double> tail_min_diffs;  // min (u^{eps_{k+1}} - u^{eps_k})
    SpaceTimeField chi;                  // 1 where u > 0 strictly
    SpaceTimeField residual;             // backward-Euler residual u_t - Delta_h u - chi, 0 on boundary / level 0
    bool converged = false;
    std::vector<SolveStats> stats;
};

/// Thrown when u^{eps_{k+1}} < u^{eps_k} - 1e-10 somewhere.
class MonotonicityError : public std::runtime_error {
public:
    MonotonicityError(const std::string& what, int level, std::size_t node, double violation)
        : std::runtime_error(what), level_(level), node_(node), violation_(violation) {}
    int level() const noexcept { return level_; }
    std::size_t node() const noexcept { return node_; }
    double violation() const noexcept { return violation_; }

private:
    int level_;
    std::size_t node_;
    double violation_;
};

/// Thrown when the schedule ends before the tail difference drops below stop_tol.
/// Carries the partial result, tail differences included.
class LeastSolutionNotConverged : public ConvergenceError {
public:
    LeastSolutionNotConverged(const std::string& what, std::shared_ptr<LeastSolutionResult> partial)
        : ConvergenceError(what, partial->tail_sup_diffs.empty() ? 0.0 : partial->tail_sup_diffs.back()),
          partial_(std::move(partial)) {}
    const LeastSolutionResult& partial() const noexcept { return *partial_; }
    std::shared_ptr<LeastSolutionResult> partial_ptr() const noexcept { return partial_; }

private:
    std::shared_ptr<LeastSolutionResult> partial_;
};

inline constexpr double kEpsMonotoneTol = 1e-10;

/// Drives eps down the schedule until successive solutions agree to stop_tol.
LeastSolutionResult least_solution(const ScenarioSpec& spec, const RegularizationSchedule& sched,
                                   bool keep_all = false);

/// chi_{u>0} with chi = 0 where u == 0.
SpaceTimeField indicator_positive(const SpaceTimeField& u);

/// Backward-Euler residual (u^k - u^{k-1})/ht - Delta_h u^k - chi(u^k) at interior nodes, levels k >= 1.
SpaceTimeField equation_residual(const SpaceTimeField& u);

struct ResidualStats {
    double max_abs = 0.0;
    std::size_t nodes_checked = 0;
    std::size_t positive_nodes = 0;
    std::size_t nonpositive_nodes = 0;
};

enum class ResidualSide { both, positive, nonpositive };

/// Max |residual| over interior nodes whose whole stencil (spatial neighbours
/// and the previous level) lies on one side: every value > band, or every
/// value <= 0. Nodes straddling the interface or inside (0, band] are skipped.
ResidualStats residual_away_from_interface(const SpaceTimeField& u, double band,
                                           ResidualSide side = ResidualSide::both);

struct TimeMonotonicityReport {
    double min_slope = 0.0;   // min over x, t1 < t2 of (u(x,t2) - u(x,t1)) / (t2 - t1)
    double c = 0.0;
    double tol = 0.0;
    bool pass = false;
    int argmin_level = 0;
    std::size_t argmin_node = 0;
};

/// Minimum of all time difference quotients. The minimum over all pairs
/// t1 < t2 equals the minimum over consecutive levels, since a long quotient
/// is an average of short ones. With positive_only, only pairs whose both
/// endpoints satisfy u > 0 are considered.
TimeMonotonicityReport check_time_monotonicity(const SpaceTimeField& u, double c, double tol = 0.0,
                                               bool positive_only = false);

}  // namespace ufb
