#pragma once

#include <Eigen/Dense>

namespace covpath {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense symmetric matrix with full storage. Every write goes to (i,j) and
// (j,i), so the stored array is exactly symmetric at all times.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Index n) : m_(MatrixXd::Zero(n, n)) {}

    // Averages with the transpose. The result is bitwise symmetric.
    static SymMatrix from_dense(const MatrixXd& m);
    static SymMatrix identity(Index n);
    static SymMatrix diagonal(const VectorXd& d);
    static SymMatrix constant(Index n, double value);

    Index size() const noexcept { return m_.rows(); }
    double operator()(Index i, Index j) const { return m_(i, j); }
    void set(Index i, Index j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const MatrixXd& dense() const noexcept { return m_; }

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend bool operator==(const SymMatrix& a, const SymMatrix& b) { return a.m_ == b.m_; }
    friend void swm_row_update(SymMatrix& inv, Index i, const VectorXd& delta);

private:
    explicit SymMatrix(MatrixXd m) : m_(std::move(m)) {}
    MatrixXd m_;
};

double frobenius_norm(const SymMatrix& m);
double frobenius_distance(const SymMatrix& a, const SymMatrix& b);
double max_abs(const SymMatrix& m);

// U with row and column i removed.
SymMatrix delete_row_col(const SymMatrix& m, Index i);

struct CholeskyResult {
    MatrixXd lower;
    double logdet = 0.0;
};

// Relative pivot floor: a pivot at or below this times max|diag| is rejected.
inline constexpr double kPivotTolerance = 1e-12;

// Throws NotPositiveDefinite.
CholeskyResult cholesky_logdet(const SymMatrix& m);

SymMatrix invert_pd(const SymMatrix& m);

// A positive definite matrix together with its inverse and log-determinant.
class PDFactor {
public:
    // Factorizes m; throws NotPositiveDefinite.
    static PDFactor factor(const SymMatrix& m);

    const SymMatrix& matrix() const noexcept { return matrix_; }
    const SymMatrix& inverse() const noexcept { return inverse_; }
    double logdet() const noexcept { return logdet_; }
    Index size() const noexcept { return matrix_.size(); }

private:
    PDFactor(SymMatrix matrix, SymMatrix inverse, double logdet)
        : matrix_(std::move(matrix)), inverse_(std::move(inverse)), logdet_(logdet) {}

    SymMatrix matrix_;
    SymMatrix inverse_;
    double logdet_ = 0.0;
};

// In-place inverse maintenance for the row/column update
//   U' = U + e_i delta^T + delta e_i^T,
// where delta holds the change of row i off the diagonal and half the
// change of the diagonal at position i. O(n^2). Throws SingularUpdate when
// the 2x2 capacitance matrix shows that U' is not positive definite.
void swm_row_update(SymMatrix& inv, Index i, const VectorXd& delta);

// Inverse of U after replacing row/column i with (new_row, new_diag).
// new_row has n-1 entries: row i of the updated U without the diagonal.
SymMatrix swm_update_inverse(const SymMatrix& current, const SymMatrix& inv, Index i,
                             const VectorXd& new_row, double new_diag);

// (U with row/col i deleted)^{-1} from inv = U^{-1} via the Schur complement
// identity. O(n^2).
SymMatrix sub_inverse(const SymMatrix& inv, Index i);

// Entries of row i excluding the diagonal, in index order.
VectorXd off_diagonal_row(const SymMatrix& m, Index i);

}  // namespace covpath
