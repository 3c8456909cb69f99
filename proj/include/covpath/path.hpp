#pragma once

#include <string>
#include <vector>

#include "covpath/barrier.hpp"
#include "covpath/corrector.hpp"
#include "covpath/predictor.hpp"
#include "covpath/symmat.hpp"

namespace covpath {

enum class WarmStart { scaling, predictor };

struct PathConfig {
    // Explicit strictly descending grid; empty selects `points` log-spaced
    // values from rho_max down to rho_min_frac * rho_max.
    std::vector<double> rho_grid;
    int points = 50;
    double rho_min_frac = 0.01;
    // Barrier weight; <= 0 derives it from gap_target as gap / (2 n^2).
    double t = 0.0;
    double gap_target = kDefaultGapTarget;
    WarmStart mode = WarmStart::scaling;
    CorrectorConfig corrector;
    CGConfig cg;
    double eps = kDefaultInitialEps;
    double zero_tol = kDefaultZeroTol;
};

// Log-spaced, descending, first value exactly rho_max.
std::vector<double> default_grid(double rho_max, int points, double rho_min_frac);

struct PathPoint {
    double rho = 0.0;
    SymMatrix U;
    SymMatrix X;  // U^{-1}
    Index cardinality = 0;
    double dual_obj = 0.0;    // -log det U - n
    double primal_obj = 0.0;  // at X; never above dual_obj
    double gap_bound = 0.0;
    double residual_norm = 0.0;
    int cg_iterations = 0;
    int sweeps = 0;
    double wall_time = 0.0;
    double inverse_drift = 0.0;
};

struct PathFailure {
    double rho = 0.0;
    std::string message;
    bool recovered = false;
};

struct RegularizationPath {
    double t = 0.0;
    std::vector<double> grid;
    std::vector<PathPoint> points;
    std::vector<PathFailure> failures;
    bool truncated = false;
};

// Solves the barrier problem on every grid value, starting from the diagonal
// point at rho_max and warm-starting each point from the previous one.
// A corrector failure is retried once through the midpoint penalty; a second
// failure truncates the path. Throws DegenerateInstance.
RegularizationPath run_path(const SymMatrix& sigma, const PathConfig& cfg);

// Residual of the central path for sigma + mu C at fixed rho.
CentralPathResidual online_residual(const Problem& p, const SymMatrix& C, double mu, const PDFactor& U, double t);

struct OnlineConfig {
    int k = 1;
    CorrectorConfig corrector;
    CGConfig cg;
    // Smallest mu-step tried before giving up.
    double min_step = 1.0 / 1024.0;
};

struct OnlineResult {
    PDFactor U;
    int steps = 0;
    int halvings = 0;
    int cg_iterations = 0;
    int sweeps = 0;
};

// Continuation in mu from the solved instance (sigma, rho, t) with solution
// U_star to sigma + C. C = 0 returns U_star untouched. Throws Infeasible when
// the homotopy leaves the feasible region even at the smallest step.
OnlineResult run_online(const Problem& p, const SymMatrix& U_star, const SymMatrix& C, double t,
                        const OnlineConfig& cfg = {});

}  // namespace covpath
