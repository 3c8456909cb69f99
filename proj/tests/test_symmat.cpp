#include "doctest.h"

#include "covpath/errors.hpp"
#include "covpath/symmat.hpp"
#include "oracles.hpp"

using namespace covpath;

TEST_CASE("from_dense averages with the transpose and is bitwise symmetric") {
    oracle::Rng rng(1);
    MatrixXd a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = rng.normal();
    const SymMatrix s = SymMatrix::from_dense(a);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(s(i, j) == s(j, i));
            CHECK(s(i, j) == doctest::Approx(0.5 * (a(i, j) + a(j, i))).epsilon(1e-15));
        }
    }
}

TEST_CASE("set writes both halves") {
    SymMatrix s(3);
    s.set(0, 2, 4.5);
    CHECK(s(2, 0) == 4.5);
    CHECK(s(0, 2) == 4.5);
    CHECK(s.dense() == s.dense().transpose());
}

TEST_CASE("arithmetic and norms") {
    const SymMatrix a = SymMatrix::identity(3);
    const SymMatrix b = SymMatrix::constant(3, 2.0);
    const SymMatrix c = a + 0.5 * b;
    CHECK(c(0, 0) == 2.0);
    CHECK(c(0, 1) == 1.0);
    CHECK(frobenius_norm(a) == doctest::Approx(std::sqrt(3.0)));
    CHECK(frobenius_distance(c - a, 0.5 * b) == 0.0);
    CHECK(max_abs(-1.0 * b) == 2.0);
    VectorXd d(3);
    d << 1, -7, 2;
    CHECK(max_abs(SymMatrix::diagonal(d)) == 7.0);
}

TEST_CASE("delete_row_col and off_diagonal_row") {
    MatrixXd a(3, 3);
    a << 1, 2, 3, 2, 4, 5, 3, 5, 6;
    const SymMatrix s = SymMatrix::from_dense(a);
    const SymMatrix d = delete_row_col(s, 1);
    REQUIRE(d.size() == 2);
    CHECK(d(0, 0) == 1);
    CHECK(d(0, 1) == 3);
    CHECK(d(1, 1) == 6);
    const VectorXd r = off_diagonal_row(s, 1);
    REQUIRE(r.size() == 2);
    CHECK(r(0) == 2);
    CHECK(r(1) == 5);
}

TEST_CASE("log-determinant matches elimination and cofactor determinants") {
    oracle::Rng rng(2);
    for (int n = 1; n <= 6; ++n) {
        const MatrixXd a = oracle::random_spd(n, rng);
        const auto chol = cholesky_logdet(SymMatrix::from_dense(a));
        CHECK(chol.logdet == doctest::Approx(std::log(oracle::cofactor_determinant(a))).epsilon(1e-12));
        CHECK(chol.logdet == doctest::Approx(std::log(oracle::determinant(a))).epsilon(1e-12));
        CHECK((chol.lower * chol.lower.transpose() - a).norm() <= 1e-12 * a.norm());
    }
}

TEST_CASE("non positive definite inputs are rejected") {
    MatrixXd a(2, 2);
    a << 1, 2, 2, 1;
    CHECK_THROWS_AS(cholesky_logdet(SymMatrix::from_dense(a)), NotPositiveDefinite);
    CHECK_THROWS_AS(PDFactor::factor(SymMatrix::from_dense(a)), NotPositiveDefinite);
    // Numerically singular: pivot far below the relative floor.
    MatrixXd b(2, 2);
    b << 1, 1, 1, 1 + 1e-15;
    CHECK_THROWS_AS(invert_pd(SymMatrix::from_dense(b)), NotPositiveDefinite);
}

TEST_CASE("inverse matches Gauss-Jordan") {
    oracle::Rng rng(3);
    for (int n : {1, 2, 5, 12}) {
        const MatrixXd a = oracle::random_spd(n, rng);
        const auto f = PDFactor::factor(SymMatrix::from_dense(a));
        CHECK((f.inverse().dense() - oracle::gauss_jordan_inverse(a)).norm() <= 1e-11 * (1.0 + f.inverse().dense().norm()));
        CHECK(f.inverse().dense() == f.inverse().dense().transpose());
        CHECK(f.size() == n);
    }
}

TEST_CASE("rank-2 row update tracks the fresh inverse") {
    oracle::Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.integer(2, 9);
        const MatrixXd a = oracle::random_spd(n, rng, 1.0);
        const int i = rng.integer(0, n - 1);
        VectorXd new_row(n - 1);
        for (int k = 0; k < n - 1; ++k) new_row(k) = a(i, k < i ? k : k + 1) + 0.1 * rng.normal();
        const double new_diag = a(i, i) + 0.1 * rng.normal();

        MatrixXd b = a;
        for (int k = 0, m = 0; k < n; ++k) {
            if (k == i) continue;
            b(i, k) = b(k, i) = new_row(m++);
        }
        b(i, i) = new_diag;
        if (Eigen::SelfAdjointEigenSolver<MatrixXd>(b).eigenvalues()(0) <= 1e-3) continue;

        const SymMatrix current = SymMatrix::from_dense(a);
        const SymMatrix updated = swm_update_inverse(current, invert_pd(current), i, new_row, new_diag);
        const MatrixXd ref = oracle::gauss_jordan_inverse(b);
        CHECK((updated.dense() - ref).norm() <= 1e-9 * ref.norm());
        CHECK(updated.dense() == updated.dense().transpose());
    }
}

TEST_CASE("row update that destroys definiteness raises SingularUpdate") {
    const SymMatrix u = SymMatrix::identity(2);
    SymMatrix inv = SymMatrix::identity(2);
    VectorXd delta(2);
    delta << 0.0, 2.0;  // off-diagonal 2 with unit diagonal
    CHECK_THROWS_AS(swm_row_update(inv, 0, delta), SingularUpdate);
    VectorXd new_row(1);
    new_row << 0.5;
    const SymMatrix ok = swm_update_inverse(u, inv, 0, new_row, 1.0);
    CHECK(ok(0, 1) == doctest::Approx(-0.5 / 0.75));
}

TEST_CASE("sub_inverse equals the inverse of the deleted matrix") {
    oracle::Rng rng(5);
    for (int n = 2; n <= 8; ++n) {
        const MatrixXd a = oracle::random_spd(n, rng);
        const SymMatrix s = SymMatrix::from_dense(a);
        const SymMatrix inv = invert_pd(s);
        for (int i = 0; i < n; ++i) {
            const MatrixXd ref = oracle::gauss_jordan_inverse(delete_row_col(s, i).dense());
            CHECK((sub_inverse(inv, i).dense() - ref).norm() <= 1e-10 * ref.norm());
        }
    }
}
