#pragma once

#include "covpath/barrier.hpp"
#include "covpath/symmat.hpp"

namespace covpath {

// Tangent system (U^{-1} (x) U^{-1} + diag(vec D)) vec(P) = vec(rhs), kept in
// factored form. For the penalty path
//   D = (L^2 + M^2) / t,   rhs = -dH/drho = (L^2 - M^2) / t,
// and for the covariance homotopy rhs = -dH/dmu = D o C.
struct PredictorSystem {
    SymMatrix U_inv;
    SymMatrix D;
    SymMatrix rhs;
};

PredictorSystem build_system(const Problem& p, const PDFactor& U, double t);

// p must already carry the shifted covariance sigma + mu C.
PredictorSystem build_online_system(const Problem& p, const PDFactor& U, double t, const SymMatrix& C);

// U^{-1} P U^{-1} + D o P, O(n^3).
SymMatrix matvec(const PredictorSystem& sys, const SymMatrix& P);

// Frobenius inner product.
double inner(const SymMatrix& a, const SymMatrix& b);

struct CGConfig {
    // Stop once the residual drops by this factor.
    double rel_drop = 1e-2;
    // <= 0 selects n^2.
    int max_iters = 0;
};

struct CGResult {
    SymMatrix direction;
    int iterations = 0;
    bool converged = false;
    double initial_residual = 0.0;
    double final_residual = 0.0;
};

// Conjugate gradient on symmetric matrices. Returns the last iterate with
// converged = false when the iteration cap is hit.
CGResult cg_solve(const PredictorSystem& sys, const CGConfig& cfg = {});

struct PredictorStep {
    SymMatrix U;
    CGResult cg;
    int halvings = 0;
};

// U + h dU/drho, feasible for rho + h. An infeasible full step is pulled back
// toward an anchor that is feasible at rho + h (the scaled warm start for
// h < 0, U itself for h > 0) by halving the step, at most 30 times.
// Throws StepCollapse.
PredictorStep predictor_step(const Problem& p, const PDFactor& U, double t, double h, const CGConfig& cfg = {});

}  // namespace covpath
