#include "covpath/barrier.hpp"

#include <cmath>

#include "covpath/errors.hpp"

namespace covpath {

Problem::Problem(SymMatrix sigma, double rho) : sigma_(std::move(sigma)), rho_(rho) {
    if (sigma_.size() < 1) throw InputError("Problem: empty covariance matrix");
    if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw InputError("Problem: rho must be positive");
    for (Index i = 0; i < sigma_.size(); ++i) {
        if (!(sigma_(i, i) > 0.0)) throw NonPositiveDiagonal("Problem: covariance diagonal must be positive");
    }
}

double rho_max(const SymMatrix& sigma) { return sigma.dense().diagonal().maxCoeff(); }

double barrier_weight(Index n, double gap_target) {
    if (!(gap_target > 0.0)) throw InputError("barrier_weight: gap target must be positive");
    return gap_target / (2.0 * static_cast<double>(n) * static_cast<double>(n));
}

bool feasible(const Problem& p, const SymMatrix& U) {
    if (U.size() != p.size()) return false;
    const MatrixXd gap = (U.dense() - p.sigma().dense()).cwiseAbs();
    if (!(gap.maxCoeff() < p.rho())) return false;
    try {
        cholesky_logdet(U);
    } catch (const NotPositiveDefinite&) {
        return false;
    }
    return true;
}

BarrierState multipliers(const Problem& p, const SymMatrix& U, double t) {
    const Index n = p.size();
    const double rho = p.rho();
    BarrierState out{t, SymMatrix(n), SymMatrix(n)};
    for (Index j = 0; j < n; ++j) {
        for (Index i = j; i < n; ++i) {
            const double d = p.sigma()(i, j) - U(i, j);
            const double upper = rho + d;
            const double lower = rho - d;
            if (!(upper > 0.0) || !(lower > 0.0)) throw Infeasible("multipliers: iterate outside the box");
            out.L.set(i, j, t / upper);
            out.M.set(i, j, t / lower);
        }
    }
    return out;
}

CentralPathResidual residual(const Problem& p, const PDFactor& U, double t) {
    auto state = multipliers(p, U.matrix(), t);
    return {state.L - state.M - U.inverse()};
}

double dual_objective(const PDFactor& U) { return -U.logdet() - static_cast<double>(U.size()); }

double primal_objective(const Problem& p, const SymMatrix& X) {
    const double logdet = cholesky_logdet(X).logdet;
    const double trace = (p.sigma().dense().cwiseProduct(X.dense())).sum();
    const double l1 = X.dense().cwiseAbs().sum();
    return logdet - trace - p.rho() * l1;
}

double barrier_objective(const Problem& p, const PDFactor& U, double t) {
    const Index n = p.size();
    const double rho = p.rho();
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double d = p.sigma()(i, j) - U.matrix()(i, j);
            const double upper = rho + d;
            const double lower = rho - d;
            if (!(upper > 0.0) || !(lower > 0.0)) throw Infeasible("barrier_objective: iterate outside the box");
            sum += std::log(upper) + std::log(lower);
        }
    }
    return -U.logdet() - t * sum;
}

double gap_bound(Index n, double t) { return 2.0 * static_cast<double>(n) * static_cast<double>(n) * t; }

SymMatrix initial_point(const SymMatrix& sigma, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InputError("initial_point: eps must lie in (0, 1)");
    const Index n = sigma.size();
    const double rmax = rho_max(sigma);
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) {
            if (std::abs(sigma(i, j)) >= rmax) {
                throw DegenerateInstance("initial_point: |sigma_ij| reaches max diagonal at (" + std::to_string(i) +
                                         "," + std::to_string(j) + ")");
            }
        }
    }
    VectorXd d = sigma.dense().diagonal().array() + (1.0 - eps) * rmax;
    return SymMatrix::diagonal(d);
}

SymMatrix scaling_warm_start(const SymMatrix& sigma, const SymMatrix& U_k, double rho_k, double rho_next) {
    const double r = rho_next / rho_k;
    return (1.0 - r) * sigma + r * U_k;
}

Index cardinality(const SymMatrix& X, double zero_tol) {
    const double cutoff = zero_tol * max_abs(X);
    return (X.dense().array().abs() > cutoff).count();
}

}  // namespace covpath
