#include "covpath/symmat.hpp"

#include <cmath>
#include <string>

#include "covpath/errors.hpp"

namespace covpath {

SymMatrix SymMatrix::from_dense(const MatrixXd& m) {
    if (m.rows() != m.cols()) throw InputError("SymMatrix: matrix is not square");
    MatrixXd s = m;
    const Index n = m.rows();
    for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i < n; ++i) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(MatrixXd::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const VectorXd& d) { return SymMatrix(MatrixXd(d.asDiagonal())); }

SymMatrix SymMatrix::constant(Index n, double value) { return SymMatrix(MatrixXd::Constant(n, n, value)); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    m_ *= s;
    return *this;
}

double frobenius_norm(const SymMatrix& m) { return m.dense().norm(); }

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) { return (a.dense() - b.dense()).norm(); }

double max_abs(const SymMatrix& m) { return m.size() == 0 ? 0.0 : m.dense().cwiseAbs().maxCoeff(); }

SymMatrix delete_row_col(const SymMatrix& m, Index i) {
    const Index n = m.size();
    SymMatrix out(n - 1);
    for (Index c = 0, cc = 0; c < n; ++c) {
        if (c == i) continue;
        for (Index r = c, rr = cc; r < n; ++r) {
            if (r == i) continue;
            out.set(rr, cc, m(r, c));
            ++rr;
        }
        ++cc;
    }
    return out;
}

CholeskyResult cholesky_logdet(const SymMatrix& m) {
    const Index n = m.size();
    if (n == 0) throw InputError("cholesky_logdet: empty matrix");
    const double max_diag = m.dense().diagonal().cwiseAbs().maxCoeff();
    Eigen::LLT<MatrixXd> llt(m.dense());
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky_logdet: matrix is not positive definite");

    CholeskyResult out;
    out.lower = llt.matrixL();
    const double floor = kPivotTolerance * max_diag;
    for (Index k = 0; k < n; ++k) {
        const double pivot = out.lower(k, k) * out.lower(k, k);
        if (!(pivot > floor)) {
            throw NotPositiveDefinite("cholesky_logdet: pivot " + std::to_string(k) + " below tolerance");
        }
        out.logdet += 2.0 * std::log(out.lower(k, k));
    }
    return out;
}

namespace {

SymMatrix inverse_from_lower(const MatrixXd& lower) {
    const Index n = lower.rows();
    MatrixXd linv = MatrixXd::Identity(n, n);
    lower.triangularView<Eigen::Lower>().solveInPlace(linv);
    // U^{-1} = L^{-T} L^{-1}
    MatrixXd inv = MatrixXd::Zero(n, n);
    inv.selfadjointView<Eigen::Lower>().rankUpdate(linv.transpose());
    inv.triangularView<Eigen::StrictlyUpper>() = inv.transpose();
    return SymMatrix::from_dense(inv);
}

}  // namespace

SymMatrix invert_pd(const SymMatrix& m) { return inverse_from_lower(cholesky_logdet(m).lower); }

PDFactor PDFactor::factor(const SymMatrix& m) {
    auto chol = cholesky_logdet(m);
    return PDFactor(m, inverse_from_lower(chol.lower), chol.logdet);
}

void swm_row_update(SymMatrix& sym, Index i, const VectorXd& delta) {
    MatrixXd& inv = sym.m_;
    const Index n = inv.rows();
    // U' = U + W C W^T with W = [e_i, delta], C = [[0,1],[1,0]] = C^{-1}.
    // K = C + W^T U^{-1} W, U'^{-1} = U^{-1} - [a b] K^{-1} [a b]^T.
    const VectorXd a = inv.col(i);
    const VectorXd b = inv * delta;
    const double k11 = a(i);
    const double k12 = 1.0 + b(i);
    const double k22 = delta.dot(b);
    const double det = k11 * k22 - k12 * k12;
    // det(K) = -det(U') / det(U), so a positive definite U' needs det < 0.
    const double scale = std::abs(k11 * k22) + k12 * k12;
    if (!(det < -1e-14 * scale)) throw SingularUpdate("swm_row_update: updated matrix is not positive definite");

    const double i11 = k22 / det;
    const double i12 = -k12 / det;
    const double i22 = k11 / det;
    for (Index c = 0; c < n; ++c) {
        const double ac = a(c);
        const double bc = b(c);
        const double g1 = i11 * ac + i12 * bc;
        const double g2 = i12 * ac + i22 * bc;
        for (Index r = c; r < n; ++r) {
            const double v = inv(r, c) - (a(r) * g1 + b(r) * g2);
            inv(r, c) = v;
            inv(c, r) = v;
        }
    }
}

SymMatrix swm_update_inverse(const SymMatrix& current, const SymMatrix& inv, Index i, const VectorXd& new_row,
                             double new_diag) {
    const Index n = current.size();
    if (new_row.size() != n - 1) throw InputError("swm_update_inverse: new_row must have n-1 entries");
    VectorXd delta(n);
    for (Index j = 0, k = 0; j < n; ++j) {
        if (j == i) {
            delta(j) = 0.5 * (new_diag - current(i, i));
        } else {
            delta(j) = new_row(k++) - current(i, j);
        }
    }
    SymMatrix out = inv;
    swm_row_update(out, i, delta);
    return out;
}

SymMatrix sub_inverse(const SymMatrix& inv, Index i) {
    const Index n = inv.size();
    const double pivot = inv(i, i);
    SymMatrix out(n - 1);
    for (Index c = 0, cc = 0; c < n; ++c) {
        if (c == i) continue;
        const double xc = inv(c, i) / pivot;
        for (Index r = c, rr = cc; r < n; ++r) {
            if (r == i) continue;
            out.set(rr, cc, inv(r, c) - inv(r, i) * xc);
            ++rr;
        }
        ++cc;
    }
    return out;
}

VectorXd off_diagonal_row(const SymMatrix& m, Index i) {
    const Index n = m.size();
    VectorXd out(n - 1);
    for (Index j = 0, k = 0; j < n; ++j) {
        if (j != i) out(k++) = m(i, j);
    }
    return out;
}

}  // namespace covpath
