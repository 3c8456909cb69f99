#include "covpath/reference.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "covpath/errors.hpp"

namespace covpath {

namespace {

using Pair = std::pair<Index, Index>;

std::vector<Pair> free_entries(Index n) {
    std::vector<Pair> out;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j; i < n; ++i) out.emplace_back(i, j);
    }
    return out;
}

// Terms e_a e_b^T making up the symmetric basis element for entry (i, j).
std::vector<Pair> basis_terms(const Pair& e) {
    if (e.first == e.second) return {e};
    return {e, {e.second, e.first}};
}

double barrier_value(const Problem& p, const SymMatrix& U, double t) {
    try {
        return barrier_objective(p, PDFactor::factor(U), t);
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

PDFactor newton_solve(const Problem& p, const SymMatrix& U0, double t, const OracleConfig& cfg, NewtonStats* stats) {
    const Index n = p.size();
    if (!feasible(p, U0)) throw Infeasible("newton_solve: starting point is not strictly feasible");
    const auto entries = free_entries(n);
    const auto m = static_cast<Index>(entries.size());

    SymMatrix U = U0;
    double previous_decrement = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        auto factor = PDFactor::factor(U);
        const auto state = multipliers(p, U, t);
        const SymMatrix H = state.L - state.M - factor.inverse();
        const double res = frobenius_norm(H);
        const MatrixXd& X = factor.inverse().dense();
        const MatrixXd D = ((state.L.dense().array().square() + state.M.dense().array().square()) / t).matrix();

        VectorXd g(m);
        MatrixXd hess(m, m);
        for (Index a = 0; a < m; ++a) {
            const auto [i, j] = entries[static_cast<std::size_t>(a)];
            const double mult = i == j ? 1.0 : 2.0;
            g(a) = mult * H(i, j);
            for (Index b = 0; b <= a; ++b) {
                double v = 0.0;
                for (const auto& [pa, qa] : basis_terms(entries[static_cast<std::size_t>(a)])) {
                    for (const auto& [rb, sb] : basis_terms(entries[static_cast<std::size_t>(b)])) {
                        v += X(qa, rb) * X(sb, pa);
                    }
                }
                hess(a, b) = v;
                hess(b, a) = v;
            }
            hess(a, a) += mult * D(i, j);
        }

        Eigen::LLT<MatrixXd> llt(hess);
        if (llt.info() != Eigen::Success) throw NumericalBreakdown("newton_solve: Hessian is not positive definite");
        const VectorXd step = -llt.solve(g);
        const double decrement = -g.dot(step);
        if (stats) *stats = {it, res, decrement};
        // Quadratic convergence squares the decrement each step; once it is
        // tiny and stops shrinking, rounding has taken over.
        const bool stalled = decrement < cfg.stall_decrement && decrement > 0.25 * previous_decrement;
        if (res <= cfg.tol || 0.5 * decrement <= cfg.decrement_tol || stalled) return factor;
        previous_decrement = decrement;
        if (it >= cfg.max_iters) throw MaxItersExceeded("newton_solve: iteration cap reached");

        SymMatrix direction(n);
        for (Index a = 0; a < m; ++a) {
            const auto [i, j] = entries[static_cast<std::size_t>(a)];
            direction.set(i, j, step(a));
        }

        const double f0 = barrier_value(p, U, t);
        double s = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
            SymMatrix trial = U + s * direction;
            if (!feasible(p, trial)) continue;
            // Near the solution take the pure Newton step; the Armijo test is
            // below floating-point resolution there.
            if (decrement < 1e-8 || barrier_value(p, trial, t) <= f0 - 0.25 * s * decrement) {
                U = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) throw LineSearchFailure("newton_solve: no acceptable step");
    }
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

MatrixXd explicit_system(const Problem& p, const PDFactor& U, double t) {
    const Index n = p.size();
    const auto state = multipliers(p, U.matrix(), t);
    const MatrixXd& X = U.inverse().dense();
    MatrixXd out(n * n, n * n);
    // Row (i,j), column (k,l): X_ik X_jl.
    for (Index l = 0; l < n; ++l) {
        for (Index k = 0; k < n; ++k) {
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i < n; ++i) out(i + n * j, k + n * l) = X(i, k) * X(j, l);
            }
        }
    }
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double L = state.L(i, j);
            const double M = state.M(i, j);
            out(i + n * j, i + n * j) += (L * L + M * M) / t;
        }
    }
    return out;
}

}  // namespace covpath
