#include "doctest.h"

#include <cmath>

#include "covpath/errors.hpp"
#include "covpath/generator.hpp"

using namespace covpath;

namespace {

double offdiag_density(const SymMatrix& m) {
    const Index n = m.size();
    Index nz = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) nz += m(i, j) != 0.0;
    return static_cast<double>(nz) / static_cast<double>(n * (n - 1) / 2);
}

}  // namespace

TEST_CASE("generator is deterministic per seed") {
    GeneratorSpec spec;
    spec.n = 30;
    spec.density = 0.1;
    spec.seed = 7;
    const auto a = generate_problem(spec);
    const auto b = generate_problem(spec);
    CHECK(a.sigma == b.sigma);
    CHECK(a.ground_truth == b.ground_truth);
    spec.seed = 8;
    CHECK_FALSE(generate_problem(spec).ground_truth == a.ground_truth);
}

TEST_CASE("zero density gives diagonal matrices") {
    GeneratorSpec spec;
    spec.n = 6;
    spec.density = 0.0;
    const auto g = generate_problem(spec);
    CHECK(offdiag_density(g.ground_truth) == 0.0);
    CHECK(offdiag_density(g.sigma) == 0.0);
    CHECK(g.nonzero_pairs == 0);
}

TEST_CASE("density, definiteness and inverse relation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (Index n : {5, 12, 40}) {
            for (double density : {0.05, 0.1, 0.5, 1.0}) {
                GeneratorSpec spec;
                spec.n = n;
                spec.density = density;
                spec.seed = seed;
                const auto g = generate_problem(spec);
                CHECK(std::abs(offdiag_density(g.ground_truth) - density) <= 0.02 + 1.0 / (n * (n - 1) / 2));
                const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(g.ground_truth.dense()).eigenvalues()(0);
                CHECK(lmin >= spec.identity_shift_margin - 1e-12);
                const MatrixXd prod = g.sigma.dense() * g.ground_truth.dense();
                CHECK((prod - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
                CHECK(g.sigma.dense() == g.sigma.dense().transpose());
            }
        }
    }
}

TEST_CASE("exact pair count at moderate size") {
    GeneratorSpec spec;
    spec.n = 100;
    spec.density = 0.1;
    spec.seed = 1;
    const auto g = generate_problem(spec);
    CHECK(g.nonzero_pairs == 495);
    CHECK(offdiag_density(g.ground_truth) == doctest::Approx(0.1));
}

TEST_CASE("generator rejects bad specs") {
    GeneratorSpec spec;
    spec.n = 1;
    CHECK_THROWS_AS(generate_problem(spec), InputError);
    spec.n = 5;
    spec.density = 1.5;
    CHECK_THROWS_AS(generate_problem(spec), InputError);
    spec.density = 0.1;
    spec.identity_shift_margin = 0.0;
    CHECK_THROWS_AS(generate_problem(spec), InputError);
}
