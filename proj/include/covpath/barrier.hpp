#pragma once

#include "covpath/symmat.hpp"

namespace covpath {

// One covariance selection instance: sample covariance and l1 penalty.
class Problem {
public:
    // Throws InputError unless sigma has a positive diagonal and rho > 0.
    Problem(SymMatrix sigma, double rho);

    const SymMatrix& sigma() const noexcept { return sigma_; }
    double rho() const noexcept { return rho_; }
    Index size() const noexcept { return sigma_.size(); }

    Problem with_rho(double rho) const { return Problem(sigma_, rho); }

private:
    SymMatrix sigma_;
    double rho_;
};

// Barrier weight and the box multipliers
//   L = t / (rho + sigma - U),  M = t / (rho - sigma + U).
struct BarrierState {
    double t = 0.0;
    SymMatrix L;
    SymMatrix M;
};

// H = L - M - U^{-1}; zero exactly on the central path.
struct CentralPathResidual {
    SymMatrix H;
    double norm() const { return frobenius_norm(H); }
};

inline constexpr double kDefaultGapTarget = 1e-3;
inline constexpr double kDefaultInitialEps = 0.01;
inline constexpr double kDefaultZeroTol = 1e-4;

double rho_max(const SymMatrix& sigma);

// Barrier weight giving a surrogate duality gap of gap_target: t = gap / (2 n^2).
double barrier_weight(Index n, double gap_target);

// Strict box feasibility |U - sigma| < rho plus positive definiteness.
bool feasible(const Problem& p, const SymMatrix& U);

// Throws Infeasible when a box slack is not positive.
BarrierState multipliers(const Problem& p, const SymMatrix& U, double t);

CentralPathResidual residual(const Problem& p, const PDFactor& U, double t);

// -log det U - n
double dual_objective(const PDFactor& U);

// log det X - Tr(sigma X) - rho ||X||_1. Throws NotPositiveDefinite.
double primal_objective(const Problem& p, const SymMatrix& X);

// -log det U - t * sum over all ordered (i,j) of
//   log(rho + sigma_ij - U_ij) + log(rho - sigma_ij + U_ij).
double barrier_objective(const Problem& p, const PDFactor& U, double t);

// Upper bound 2 n^2 t on the dual suboptimality of the central point.
double gap_bound(Index n, double t);

// Diagonal start U_ii = sigma_ii + (1 - eps) rho_max, feasible at rho_max.
// Throws DegenerateInstance if some |sigma_ij| >= rho_max off the diagonal.
SymMatrix initial_point(const SymMatrix& sigma, double eps = kDefaultInitialEps);

// (1 - rho_next/rho_k) sigma + (rho_next/rho_k) U_k
SymMatrix scaling_warm_start(const SymMatrix& sigma, const SymMatrix& U_k, double rho_k, double rho_next);

// Number of entries with |X_ij| > zero_tol * max|X|.
Index cardinality(const SymMatrix& X, double zero_tol = kDefaultZeroTol);

}  // namespace covpath
