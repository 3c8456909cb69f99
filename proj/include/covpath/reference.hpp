#pragma once

#include <functional>

#include "covpath/barrier.hpp"
#include "covpath/symmat.hpp"

namespace covpath {

// Slow, independent solvers used to validate the fast path. Small n only.

struct OracleConfig {
    double tol = 1e-10;
    int max_iters = 200;
    // Also stop once half the squared Newton decrement falls below this.
    double decrement_tol = 1e-30;
    // Below this, a decrement that fails to drop by 4x marks the rounding
    // floor, which at tiny t can sit above tol.
    double stall_decrement = 1e-16;
};

struct NewtonStats {
    int iterations = 0;
    double residual_norm = 0.0;
    double decrement = 0.0;
};

// Damped Newton on the n(n+1)/2 free entries of U with a backtracking line
// search that keeps U strictly feasible. Throws LineSearchFailure or
// MaxItersExceeded.
PDFactor newton_solve(const Problem& p, const SymMatrix& U0, double t, const OracleConfig& cfg = {},
                      NewtonStats* stats = nullptr);

// Minimizer of a unimodal f on [lo, hi] to within tol.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

// Dense n^2 x n^2 matrix U^{-1} (x) U^{-1} + diag(vec D) in column-major
// vec order, with D = (L^2 + M^2) / t.
MatrixXd explicit_system(const Problem& p, const PDFactor& U, double t);

}  // namespace covpath
