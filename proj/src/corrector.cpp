#include "covpath/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "covpath/errors.hpp"

namespace covpath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPartialSweepProgress = 0.9;

struct Interval {
    double lo;
    double hi;
    bool empty() const { return !(lo < hi); }
    bool contains(double x) const { return x > lo && x < hi; }
};

// Points where the box slack is at least the guard and the Schur
// complement alpha x^2 + beta x + gamma stays positive.
Interval coordinate_interval(const CoordCoefficients& cc, double b, double rho) {
    const double guard = kBoundaryGuard * rho;
    Interval box{b - rho + guard, b + rho - guard};
    // alpha < 0: the quadratic is positive strictly between its roots.
    const double disc = cc.beta * cc.beta - 4.0 * cc.alpha * cc.gamma;
    if (!(disc > 0.0)) return {0.0, 0.0};
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (cc.beta + std::copysign(sq, cc.beta));
    double r1 = q / cc.alpha;
    double r2 = q != 0.0 ? cc.gamma / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    return {std::max(box.lo, r1), std::min(box.hi, r2)};
}

double coordinate_derivative(const CoordCoefficients& cc, double b, double rho, double t, double x) {
    return -(2.0 * cc.alpha * x + cc.beta) / cc.quadratic(x) + 2.0 * t / (rho + b - x) - 2.0 * t / (rho - b + x);
}

double coordinate_second_derivative(const CoordCoefficients& cc, double b, double rho, double t, double x) {
    const double q = cc.quadratic(x);
    const double dq = 2.0 * cc.alpha * x + cc.beta;
    const double up = rho + b - x;
    const double lo = rho - b + x;
    return (dq * dq - 2.0 * cc.alpha * q) / (q * q) + 2.0 * t / (up * up) + 2.0 * t / (lo * lo);
}

double diagonal_derivative(double s, double c, double rho, double t, double w) {
    return -1.0 / (w - s) + t / (rho + c - w) - t / (rho - c + w);
}

double diagonal_second_derivative(double s, double c, double rho, double t, double w) {
    const double a = w - s;
    const double up = rho + c - w;
    const double lo = rho - c + w;
    return 1.0 / (a * a) + t / (up * up) + t / (lo * lo);
}

// Newton steps on a convex 1-D objective, each kept only if it stays inside
// the interval and shrinks the derivative.
template <class D1, class D2>
double polish(double x, const Interval& iv, D1&& d1, D2&& d2) {
    double g = d1(x);
    for (int it = 0; it < 4 && g != 0.0; ++it) {
        const double h = d2(x);
        if (!(h > 0.0) || !std::isfinite(g)) break;
        const double y = x - g / h;
        if (!iv.contains(y)) break;
        const double gy = d1(y);
        if (!(std::abs(gy) < std::abs(g))) break;
        x = y;
        g = gy;
    }
    return x;
}

// Zero of an increasing derivative on an open interval where it runs from
// negative to positive.
template <class D1>
double bisect_derivative(const Interval& iv, D1&& d1) {
    double lo = iv.lo;
    double hi = iv.hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        (d1(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double BlockPartition::schur() const { return w - u.dot(V_inv.dense() * u); }

BlockPartition make_partition(const Problem& p, const SymMatrix& U, const SymMatrix& U_inv, Index i) {
    BlockPartition bp;
    bp.i = i;
    bp.V_inv = sub_inverse(U_inv, i);
    bp.u = off_diagonal_row(U, i);
    bp.w = U(i, i);
    bp.b = off_diagonal_row(p.sigma(), i);
    bp.c = p.sigma()(i, i);
    return bp;
}

BlockPartition make_partition(const Problem& p, const PDFactor& U, Index i) {
    return make_partition(p, U.matrix(), U.inverse(), i);
}

double block_objective(const BlockPartition& bp, const Problem& p, double t) {
    const double rho = p.rho();
    const double schur = bp.schur();
    const double up = rho + bp.c - bp.w;
    const double lo = rho - bp.c + bp.w;
    if (!(schur > 0.0) || !(up > 0.0) || !(lo > 0.0)) throw Infeasible("block_objective: block point infeasible");
    double off = 0.0;
    for (Index j = 0; j < bp.u.size(); ++j) {
        const double a = rho + bp.b(j) - bp.u(j);
        const double z = rho - bp.b(j) + bp.u(j);
        if (!(a > 0.0) || !(z > 0.0)) throw Infeasible("block_objective: block point infeasible");
        off += std::log(a) + std::log(z);
    }
    return -std::log(schur) - t * (std::log(up) + std::log(lo)) - 2.0 * t * off;
}

CoordCoefficients coord_coefficients(const BlockPartition& bp, Index j) {
    const MatrixXd& vinv = bp.V_inv.dense();
    const double vjj = vinv(j, j);
    const double cross = vinv.col(j).dot(bp.u) - vjj * bp.u(j);
    CoordCoefficients cc;
    cc.alpha = -vjj;
    cc.beta = -2.0 * cross;
    cc.gamma = bp.schur() - cc.alpha * bp.u(j) * bp.u(j) - cc.beta * bp.u(j);
    return cc;
}

CubicCoefficients cubic_coefficients(const CoordCoefficients& cc, double b, double rho, double t) {
    const double a = cc.alpha;
    const double be = cc.beta;
    const double g = cc.gamma;
    CubicCoefficients out;
    out.p1 = 2.0 * (1.0 + 2.0 * t) * a;
    out.p2 = (1.0 + 4.0 * t) * be - 4.0 * (1.0 + t) * a * b;
    out.p3 = 4.0 * t * g - 2.0 * (1.0 + 2.0 * t) * be * b + 2.0 * a * (b * b - rho * rho);
    out.p4 = be * (b * b - rho * rho) - 4.0 * t * g * b;
    return out;
}

std::vector<double> real_cubic_roots(const CubicCoefficients& cubic) {
    if (cubic.p1 == 0.0) throw NumericalBreakdown("real_cubic_roots: leading coefficient is zero");
    const double a = cubic.p2 / cubic.p1;
    const double b = cubic.p3 / cubic.p1;
    const double c = cubic.p4 / cubic.p1;
    // x = y - a/3 gives y^3 + P y + Q = 0.
    const double shift = a / 3.0;
    const double P = b - a * a / 3.0;
    const double Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = 0.25 * Q * Q + P * P * P / 27.0;

    std::vector<double> roots;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double s = std::cbrt(-0.5 * Q - std::copysign(sq, Q));
        const double y = s != 0.0 ? s - P / (3.0 * s) : 0.0;
        roots.push_back(y - shift);
    } else if (P == 0.0) {
        roots.push_back(-shift);
    } else {
        const double r = 2.0 * std::sqrt(-P / 3.0);
        const double arg = std::clamp(3.0 * Q / (P * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }

    // Two Newton steps on the polynomial to clean up cancellation.
    for (double& x : roots) {
        for (int it = 0; it < 2; ++it) {
            const double f = cubic(x);
            const double df = (3.0 * cubic.p1 * x + 2.0 * cubic.p2) * x + cubic.p3;
            if (df == 0.0 || !std::isfinite(f)) break;
            const double y = x - f / df;
            if (!(std::abs(cubic(y)) < std::abs(f))) break;
            x = y;
        }
    }
    for (double x : roots) {
        if (!std::isfinite(x)) throw NumericalBreakdown("real_cubic_roots: non-finite root");
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double coordinate_objective(const CoordCoefficients& cc, double b, double rho, double t, double x) {
    const double q = cc.quadratic(x);
    const double up = rho + b - x;
    const double lo = rho - b + x;
    if (!(q > 0.0) || !(up > 0.0) || !(lo > 0.0)) return kInf;
    return -std::log(q) - 2.0 * t * (std::log(up) + std::log(lo));
}

double diagonal_objective(double s, double c, double rho, double t, double w) {
    const double a = w - s;
    const double up = rho + c - w;
    const double lo = rho - c + w;
    if (!(a > 0.0) || !(up > 0.0) || !(lo > 0.0)) return kInf;
    return -std::log(a) - t * (std::log(up) + std::log(lo));
}

double solve_coordinate(const CoordCoefficients& cc, double b, double rho, double t, double x_current) {
    const Interval iv = coordinate_interval(cc, b, rho);
    if (iv.empty()) return x_current;

    auto d1 = [&](double x) { return coordinate_derivative(cc, b, rho, t, x); };
    auto d2 = [&](double x) { return coordinate_second_derivative(cc, b, rho, t, x); };

    // The objective is strictly convex on the interval, so exactly one root
    // of the cubic is its minimizer. Select by stationarity: objective
    // values cannot separate points closer than sqrt(machine epsilon).
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_slope = kInf;
    for (double r : real_cubic_roots(cubic_coefficients(cc, b, rho, t))) {
        if (!iv.contains(r)) continue;
        const double x = polish(r, iv, d1, d2);
        const double slope = std::abs(d1(x));
        if (slope < best_slope) {
            best = x;
            best_slope = slope;
        }
    }
    if (std::isnan(best)) best = polish(bisect_derivative(iv, d1), iv, d1, d2);

    const double v = coordinate_objective(cc, b, rho, t, best);
    const double v0 = coordinate_objective(cc, b, rho, t, x_current);
    if (std::isfinite(v0) && v > v0 + 1e-14 * (1.0 + std::abs(v0))) return x_current;
    return best;
}

double solve_diagonal(double s, double c, double rho, double t) {
    const double guard = kBoundaryGuard * rho;
    const Interval iv{std::max(s, c - rho) + guard, c + rho - guard};
    if (iv.empty()) throw NoFeasibleRoot("solve_diagonal: empty feasible interval");

    const double A = 1.0 + 2.0 * t;
    const double B = -2.0 * (t * s + c * (1.0 + t));
    const double C = c * c - rho * rho + 2.0 * t * c * s;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw NoFeasibleRoot("solve_diagonal: negative discriminant");
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    double roots[2] = {q / A, q != 0.0 ? C / q : q / A};

    auto d1 = [&](double w) { return diagonal_derivative(s, c, rho, t, w); };
    auto d2 = [&](double w) { return diagonal_second_derivative(s, c, rho, t, w); };
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_slope = kInf;
    for (double r : roots) {
        if (!iv.contains(r)) continue;
        const double w = polish(r, iv, d1, d2);
        const double slope = std::abs(d1(w));
        if (slope < best_slope) {
            best = w;
            best_slope = slope;
        }
    }
    if (std::isnan(best)) throw NoFeasibleRoot("solve_diagonal: no root inside the feasible interval");
    return best;
}

RowScores row_scores(const Problem& p, const SymMatrix& U, const SymMatrix& U_inv) {
    const Index n = p.size();
    RowScores out{VectorXd(n)};
    for (Index i = 0; i < n; ++i) {
        out.delta(i) = std::max(0.0, (p.rho() + p.sigma()(i, i) - U(i, i)) * U_inv(i, i));
    }
    return out;
}

RowScores row_scores(const Problem& p, const PDFactor& U) { return row_scores(p, U.matrix(), U.inverse()); }

BlockDualValue block_dual_point(const BlockPartition& bp, const SymMatrix& U, const Problem& p, double t) {
    const double rho = p.rho();
    const Index m = bp.u.size();
    const double n = static_cast<double>(m + 1);

    BlockDualValue out;
    out.primal = block_objective(bp, p, t);

    const double a2 = t / (rho + bp.c - bp.w);
    const double a3 = t / (rho - bp.c + bp.w);
    const double a1 = a2 - a3;
    if (!(a1 > 0.0)) {
        out.dual = -kInf;
        out.gap = kInf;
        return out;
    }

    double dual = 1.0 + 2.0 * t * (2.0 * n - 1.0) + std::log(a1) - a2 * (rho + bp.c) - a3 * (rho - bp.c) +
                  t * std::log(a2 / t) + t * std::log(a3 / t);
    VectorXd diff(m);
    for (Index j = 0; j < m; ++j) {
        const double beta = 2.0 * t / (rho + bp.b(j) - bp.u(j));
        const double eta = 2.0 * t / (rho - bp.b(j) + bp.u(j));
        dual += -beta * (rho + bp.b(j)) - eta * (rho - bp.b(j)) +
                2.0 * t * (std::log(beta / (2.0 * t)) + std::log(eta / (2.0 * t)));
        diff(j) = beta - eta;
    }

    // min over u of a1 u^T V^{-1} u + (beta - eta)^T u.
    const Index full = U.size();
    VectorXd embedded = VectorXd::Zero(full);
    for (Index j = 0, k = 0; j < full; ++j) {
        if (j != bp.i) embedded(j) = diff(k++);
    }
    const double quad = embedded.dot(U.dense() * embedded);
    dual -= quad / (4.0 * a1);

    out.dual = dual;
    out.gap = out.primal - out.dual;
    return out;
}

namespace {

double residual_norm_cached(const Problem& p, const MatrixXd& U, const MatrixXd& X, double t) {
    const Index n = p.size();
    const double rho = p.rho();
    const MatrixXd& S = p.sigma().dense();
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double d = S(i, j) - U(i, j);
            const double h = t / (rho + d) - t / (rho - d) - X(i, j);
            sum += h * h;
        }
    }
    return std::sqrt(sum);
}

std::vector<Index> select_rows(const Problem& p, const MatrixXd& U, const MatrixXd& X, double fraction) {
    const Index n = p.size();
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    if (fraction >= 1.0) return rows;
    const auto k = static_cast<std::size_t>(std::max<double>(1.0, std::ceil(fraction * static_cast<double>(n))));
    VectorXd delta(n);
    for (Index i = 0; i < n; ++i) delta(i) = (p.rho() + p.sigma()(i, i) - U(i, i)) * X(i, i);
    std::stable_sort(rows.begin(), rows.end(), [&](Index a, Index b) { return delta(a) > delta(b); });
    rows.resize(k);
    return rows;
}

}  // namespace

CorrectorResult corrector_solve(const Problem& p, const SymMatrix& U0, double t, const CorrectorConfig& cfg) {
    const Index n = p.size();
    const double rho = p.rho();
    const double tol = cfg.residual_tolerance(n);
    if (!(t > 0.0)) throw InputError("corrector_solve: t must be positive");
    if (!feasible(p, U0)) throw Infeasible("corrector_solve: starting point is not strictly feasible");

    SymMatrix U = U0;
    SymMatrix X = invert_pd(U0);

    CorrectorResult result{PDFactor::factor(U0), 0, 0, 0.0, 0.0, 0.0, {}};
    double best_residual = kInf;
    SymMatrix best = U;

    VectorXd vu(n - 1);
    VectorXd delta(n);
    long since_refresh = 0;
    double previous_residual = kInf;

    for (int sweep = 0;; ++sweep) {
        double res = residual_norm_cached(p, U.dense(), X.dense(), t);
        if (res <= tol) {
            // Confirm against a fresh factorization before accepting.
            auto fresh = PDFactor::factor(U);
            const double fresh_res = residual(p, fresh, t).norm();
            if (fresh_res <= tol) {
                result.U = std::move(fresh);
                result.sweeps = sweep;
                result.residual_norm = fresh_res;
                return result;
            }
            X = fresh.inverse();
            res = fresh_res;
        }
        if (res < best_residual) {
            best_residual = res;
            best = U;
        }
        if (sweep >= cfg.max_sweeps) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "corrector_solve: residual %.3e above tolerance %.3e after %d sweeps",
                          best_residual, tol, cfg.max_sweeps);
            throw MaxSweepsExceeded(msg,
                                    best.dense(), best_residual);
        }

        // A partial sweep that did not cut the residual is followed by a full one.
        const double fraction = res > kPartialSweepProgress * previous_residual ? 1.0 : cfg.sweep_fraction;
        previous_residual = res;

        double sweep_block_gap = 0.0;
        for (Index i : select_rows(p, U.dense(), X.dense(), fraction)) {
            BlockPartition bp = make_partition(p, U, X, i);
            if (cfg.track_block_gaps) {
                sweep_block_gap = std::max(sweep_block_gap, block_dual_point(bp, U, p, t).gap);
            }
            const MatrixXd& vinv = bp.V_inv.dense();
            const VectorXd u_old = bp.u;
            const double w_old = bp.w;
            vu.noalias() = vinv * bp.u;

            for (int pass = 0; pass < cfg.max_inner_passes; ++pass) {
                double s = bp.u.dot(vu);
                double max_change = 0.0;
                for (Index j = 0; j < n - 1; ++j) {
                    const double uj = bp.u(j);
                    const double vjj = vinv(j, j);
                    CoordCoefficients cc;
                    cc.alpha = -vjj;
                    cc.beta = -2.0 * (vu(j) - vjj * uj);
                    cc.gamma = (bp.w - s) - cc.alpha * uj * uj - cc.beta * uj;
                    const double x = solve_coordinate(cc, bp.b(j), rho, t, uj);
                    const double d = x - uj;
                    if (d != 0.0) {
                        s += d * (2.0 * vu(j) + d * vjj);
                        vu.noalias() += d * vinv.col(j);
                        bp.u(j) = x;
                        max_change = std::max(max_change, std::abs(d));
                    }
                }
                s = bp.u.dot(vu);
                const double w = solve_diagonal(s, bp.c, rho, t);
                max_change = std::max(max_change, std::abs(w - bp.w));
                bp.w = w;
                if (max_change < cfg.tol_block) break;
            }

            for (Index j = 0, k = 0; j < n; ++j) {
                if (j == i) {
                    delta(j) = 0.5 * (bp.w - w_old);
                } else {
                    delta(j) = bp.u(k) - u_old(k);
                    ++k;
                }
            }
            if (delta.cwiseAbs().maxCoeff() == 0.0) continue;

            for (Index j = 0, k = 0; j < n; ++j) {
                if (j != i) U.set(i, j, bp.u(k++));
            }
            U.set(i, i, bp.w);
            try {
                swm_row_update(X, i, delta);
            } catch (const SingularUpdate&) {
                X = invert_pd(U);
                since_refresh = 0;
            }
            ++result.row_updates;

            if (cfg.refresh_interval > 0 && ++since_refresh >= cfg.refresh_interval) {
                SymMatrix fresh = invert_pd(U);
                result.max_inverse_drift = std::max(result.max_inverse_drift, frobenius_distance(fresh, X));
                X = std::move(fresh);
                since_refresh = 0;
            }
        }
        result.max_block_gap = sweep_block_gap;

        if (cfg.record_objective) result.objective_trace.push_back(barrier_objective(p, PDFactor::factor(U), t));
        if (cfg.block_gap_tol > 0.0 && cfg.track_block_gaps && sweep_block_gap <= cfg.block_gap_tol) {
            auto fresh = PDFactor::factor(U);
            result.residual_norm = residual(p, fresh, t).norm();
            result.U = std::move(fresh);
            result.sweeps = sweep + 1;
            return result;
        }
    }
}

}  // namespace covpath
