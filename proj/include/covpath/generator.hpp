#pragma once

#include <cstdint>

#include "covpath/symmat.hpp"

namespace covpath {

struct GeneratorSpec {
    Index n = 0;
    // Fraction of off-diagonal pairs that are nonzero in the ground truth.
    double density = 0.1;
    std::uint64_t seed = 0;
    // Smallest eigenvalue of the ground truth after the identity shift.
    double identity_shift_margin = 0.1;
};

struct GeneratedProblem {
    SymMatrix sigma;         // inverse of the ground truth
    SymMatrix ground_truth;  // sparse positive definite inverse covariance
    Index nonzero_pairs = 0;
};

// Sparse symmetric matrix with round(density * n(n-1)/2) Gaussian off-diagonal
// pairs and Gaussian diagonal, shifted by a multiple of the identity so that
// its smallest eigenvalue is at least the margin. Bitwise reproducible for a
// given seed.
GeneratedProblem generate_problem(const GeneratorSpec& spec);

}  // namespace covpath
