#include "covpath/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "covpath/errors.hpp"

namespace covpath {

namespace {

// Box-Muller on the raw engine, so the stream does not depend on the
// standard library's distribution implementations.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double uniform_open() {
        // 53 random bits mapped to (0, 1).
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do r = rng_();
        while (r >= limit);
        return r % bound;
    }

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 2.0 * std::numbers::pi * uniform_open();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

GeneratedProblem generate_problem(const GeneratorSpec& spec) {
    if (spec.n < 2) throw InputError("generator: n must be at least 2");
    if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw InputError("generator: density must lie in [0, 1]");
    if (!(spec.identity_shift_margin > 0.0)) throw InputError("generator: shift margin must be positive");

    const Index n = spec.n;
    Gaussian g(spec.seed);

    const Index pairs = n * (n - 1) / 2;
    const Index chosen = static_cast<Index>(std::llround(spec.density * static_cast<double>(pairs)));
    std::vector<Index> order(static_cast<std::size_t>(pairs));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index k = 0; k < chosen; ++k) {
        const auto j = k + static_cast<Index>(g.below(static_cast<std::uint64_t>(pairs - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
    }
    std::sort(order.begin(), order.begin() + chosen);

    MatrixXd a = MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) a(i, i) = g.next();
    // Pair index k enumerates the strict upper triangle row by row.
    Index k = 0, pos = 0;
    for (Index i = 0; i < n && pos < chosen; ++i) {
        for (Index j = i + 1; j < n && pos < chosen; ++j, ++k) {
            if (order[static_cast<std::size_t>(pos)] == k) {
                const double v = g.next();
                a(i, j) = v;
                a(j, i) = v;
                ++pos;
            }
        }
    }

    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const double shift = std::max(0.0, spec.identity_shift_margin - lmin);
    a.diagonal().array() += shift;

    GeneratedProblem out;
    out.ground_truth = SymMatrix::from_dense(a);
    out.sigma = invert_pd(out.ground_truth);
    out.nonzero_pairs = chosen;
    return out;
}

}  // namespace covpath
