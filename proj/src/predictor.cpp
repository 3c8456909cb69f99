#include "covpath/predictor.hpp"

#include <cmath>

#include "covpath/errors.hpp"

namespace covpath {

PredictorSystem build_system(const Problem& p, const PDFactor& U, double t) {
    const auto state = multipliers(p, U.matrix(), t);
    const auto L = state.L.dense().array();
    const auto M = state.M.dense().array();
    return {U.inverse(), SymMatrix::from_dense(((L * L + M * M) / t).matrix()),
            SymMatrix::from_dense(((L * L - M * M) / t).matrix())};
}

PredictorSystem build_online_system(const Problem& p, const PDFactor& U, double t, const SymMatrix& C) {
    const auto state = multipliers(p, U.matrix(), t);
    const auto L = state.L.dense().array();
    const auto M = state.M.dense().array();
    const MatrixXd D = ((L * L + M * M) / t).matrix();
    return {U.inverse(), SymMatrix::from_dense(D), SymMatrix::from_dense(D.cwiseProduct(C.dense()))};
}

SymMatrix matvec(const PredictorSystem& sys, const SymMatrix& P) {
    const MatrixXd& X = sys.U_inv.dense();
    const MatrixXd XP = X * P.dense();
    MatrixXd out = XP * X;
    out += sys.D.dense().cwiseProduct(P.dense());
    return SymMatrix::from_dense(out);
}

double inner(const SymMatrix& a, const SymMatrix& b) { return a.dense().cwiseProduct(b.dense()).sum(); }

CGResult cg_solve(const PredictorSystem& sys, const CGConfig& cfg) {
    const Index n = sys.rhs.size();
    const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : static_cast<int>(n * n);

    CGResult out{SymMatrix(n)};
    SymMatrix r = sys.rhs;
    double rr = inner(r, r);
    out.initial_residual = std::sqrt(rr);
    out.final_residual = out.initial_residual;
    if (rr == 0.0) {
        out.converged = true;
        return out;
    }
    const double target = cfg.rel_drop * out.initial_residual;
    SymMatrix dir = r;
    while (out.iterations < max_iters) {
        const SymMatrix Ad = matvec(sys, dir);
        const double curvature = inner(dir, Ad);
        if (!(curvature > 0.0)) throw NumericalBreakdown("cg_solve: operator is not positive definite");
        const double step = rr / curvature;
        out.direction += step * dir;
        r -= step * Ad;
        const double rr_next = inner(r, r);
        ++out.iterations;
        out.final_residual = std::sqrt(rr_next);
        if (out.final_residual <= target) {
            out.converged = true;
            break;
        }
        dir = r + (rr_next / rr) * dir;
        rr = rr_next;
    }
    return out;
}

PredictorStep predictor_step(const Problem& p, const PDFactor& U, double t, double h, const CGConfig& cfg) {
    if (h == 0.0) return {U.matrix(), CGResult{SymMatrix(U.size()), 0, true}, 0};
    const double rho_next = p.rho() + h;
    if (!(rho_next > 0.0)) throw InputError("predictor_step: rho + h must stay positive");
    const Problem target = p.with_rho(rho_next);

    PredictorStep out{U.matrix(), cg_solve(build_system(p, U, t), cfg), 0};
    const SymMatrix full = U.matrix() + h * out.cg.direction;
    if (feasible(target, full)) {
        out.U = full;
        return out;
    }
    const SymMatrix anchor = h < 0.0 ? scaling_warm_start(p.sigma(), U.matrix(), p.rho(), rho_next) : U.matrix();
    const SymMatrix step = full - anchor;
    double frac = 1.0;
    for (int k = 1; k <= 30; ++k) {
        frac *= 0.5;
        SymMatrix candidate = anchor + frac * step;
        if (feasible(target, candidate)) {
            out.U = std::move(candidate);
            out.halvings = k;
            return out;
        }
    }
    throw StepCollapse("predictor_step: no feasible point after 30 halvings");
}

}  // namespace covpath
