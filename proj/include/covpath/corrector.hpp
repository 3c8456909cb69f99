#pragma once

#include <vector>

#include "covpath/barrier.hpp"
#include "covpath/symmat.hpp"

namespace covpath {

// Row/column i of U and sigma split as
//   U = [V u; u^T w],   sigma = [A b; b^T c].
// Only V^{-1} is kept; the block objective never touches A.
struct BlockPartition {
    Index i = 0;
    SymMatrix V_inv;
    VectorXd u;
    double w = 0.0;
    VectorXd b;
    double c = 0.0;

    // w - u^T V^{-1} u
    double schur() const;
};

BlockPartition make_partition(const Problem& p, const PDFactor& U, Index i);
BlockPartition make_partition(const Problem& p, const SymMatrix& U, const SymMatrix& U_inv, Index i);

// Restriction of the barrier objective to row/column i (up to a constant).
double block_objective(const BlockPartition& bp, const Problem& p, double t);

// w - u^T V^{-1} u = alpha x^2 + beta x + gamma as a function of x = u_j.
struct CoordCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    double quadratic(double x) const { return (alpha * x + beta) * x + gamma; }
};

CoordCoefficients coord_coefficients(const BlockPartition& bp, Index j);

// Stationarity of the one-coordinate block objective, multiplied through by
// its denominators: p1 x^3 + p2 x^2 + p3 x + p4 = 0.
struct CubicCoefficients {
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;
    double p4 = 0.0;

    double operator()(double x) const { return ((p1 * x + p2) * x + p3) * x + p4; }
};

CubicCoefficients cubic_coefficients(const CoordCoefficients& cc, double b_j, double rho, double t);

// Real roots of the cubic, ascending. Requires p1 != 0.
std::vector<double> real_cubic_roots(const CubicCoefficients& cubic);

// -log(alpha x^2 + beta x + gamma) - 2t [log(rho + b - x) + log(rho - b + x)];
// +inf outside the feasible interval.
double coordinate_objective(const CoordCoefficients& cc, double b_j, double rho, double t, double x);

// -log(w - s) - t [log(rho + c - w) + log(rho - c + w)]; +inf outside.
double diagonal_objective(double s, double c, double rho, double t, double w);

// Box slack kept by every accepted update, relative to rho.
inline constexpr double kBoundaryGuard = 1e-12;

// Minimizer of the one-coordinate block objective via the closed-form cubic.
// Returns x_current when the feasible interval is empty.
double solve_coordinate(const CoordCoefficients& cc, double b_j, double rho, double t, double x_current);

// Minimizer over the diagonal entry w with s = u^T V^{-1} u, from
//   (1+2t) w^2 - 2 (t s + c (1+t)) w + c^2 - rho^2 + 2 t c s = 0.
// Throws NoFeasibleRoot.
double solve_diagonal(double s, double c, double rho, double t);

// delta_i = (rho + sigma_ii - U_ii) * (U^{-1})_ii: the first-order dual
// decrease available from moving U_ii to its upper bound.
struct RowScores {
    VectorXd delta;
};

RowScores row_scores(const Problem& p, const PDFactor& U);
RowScores row_scores(const Problem& p, const SymMatrix& U, const SymMatrix& U_inv);

// Lagrange dual of the block problem evaluated at multipliers read off the
// current block point.
struct BlockDualValue {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;  // primal - dual; +inf when the multipliers are not dual feasible
};

// U is the full current iterate; V = U without row/column bp.i enters the
// dual through the quadratic term in (beta - eta).
BlockDualValue block_dual_point(const BlockPartition& bp, const SymMatrix& U, const Problem& p, double t);

struct CorrectorConfig {
    double tol_residual = -1.0;  // <= 0 selects 1e-6 * n
    double tol_block = 1e-9;
    int max_inner_passes = 20;
    int max_sweeps = 500;
    // Fraction of rows visited per sweep, ranked by delta. 1 = full cyclic scan.
    // A partial sweep that leaves the residual above 0.9 times its previous
    // value is followed by a full scan.
    double sweep_fraction = 1.0;
    // Compare the maintained inverse against a fresh one every this many row
    // updates (0 disables) and replace it.
    int refresh_interval = 0;
    // Secondary stop on the largest block duality gap of a sweep (0 disables).
    double block_gap_tol = 0.0;
    bool track_block_gaps = false;
    // Store the barrier objective after every sweep (one factorization each).
    bool record_objective = false;

    double residual_tolerance(Index n) const { return tol_residual > 0.0 ? tol_residual : 1e-6 * static_cast<double>(n); }
};

struct CorrectorResult {
    PDFactor U;
    int sweeps = 0;
    long row_updates = 0;
    double residual_norm = 0.0;
    double max_inverse_drift = 0.0;  // over periodic refreshes
    double max_block_gap = 0.0;      // last sweep, when tracked
    std::vector<double> objective_trace;  // filled when record_objective is set
};

// Block coordinate descent on the barrier problem at fixed (rho, t), keeping
// U^{-1} current with rank-2 updates. Throws Infeasible for a bad start and
// MaxSweepsExceeded when the residual tolerance is not met.
CorrectorResult corrector_solve(const Problem& p, const SymMatrix& U0, double t, const CorrectorConfig& cfg = {});

}  // namespace covpath
