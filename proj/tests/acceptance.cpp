#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "covpath/barrier.hpp"
#include "covpath/cli.hpp"
#include "covpath/corrector.hpp"
#include "covpath/errors.hpp"
#include "covpath/generator.hpp"
#include "covpath/io.hpp"
#include "covpath/path.hpp"
#include "covpath/predictor.hpp"
#include "covpath/reference.hpp"
#include "oracles.hpp"

using namespace covpath;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Pinned tolerances.
constexpr double kDiagonalTol = 1e-4;
constexpr double kDiagonalSeconds = 1.0;
constexpr double kSurrogateSlack = 1e-8;
constexpr double kSurrogateSeconds = 30.0;
constexpr double kEquivalenceTol = 1e-5;
constexpr double kEquivalenceSeconds = 60.0;
constexpr double kGoldenTol = 1e-6;
constexpr double kClosedFormSeconds = 10.0;
constexpr double kMatvecTol = 1e-10;
constexpr double kFiniteDifferenceTol = 1e-6;
constexpr double kDenseSolveTol = 1e-4;
constexpr double kPredictorSeconds = 30.0;
constexpr double kDriftTol = 1e-8;
constexpr double kOnlineTol = 1e-6;
constexpr double kPathSeconds = 120.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, seconds_since(start),
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
}

SymMatrix dense(const MatrixXd& m) { return SymMatrix::from_dense(m); }

SymMatrix start_for(const Problem& p) {
    return scaling_warm_start(p.sigma(), initial_point(p.sigma()), rho_max(p.sigma()), p.rho());
}

Problem random_problem(int n, oracle::Rng& rng, double lo, double hi) {
    const SymMatrix s = dense(oracle::random_spd(n, rng, 0.3));
    return Problem(s, rng.uniform(lo, hi) * rho_max(s));
}

double golden_min(const std::function<double(double)>& f, double lo, double hi) {
    const double m = 1e-13 * (hi - lo);
    return golden_section(f, lo + m, hi - m, 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

VectorXd vec(const MatrixXd& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "covpath_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int cli_run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

Outcome diagonal_closed_form() {
    Outcome o;
    VectorXd d(3);
    d << 1.0, 2.0, 3.0;
    const auto start = Clock::now();
    PathConfig cfg;
    cfg.gap_target = 1e-6;
    const auto path = run_path(SymMatrix::diagonal(d), cfg);
    const double elapsed = seconds_since(start);
    o.require(!path.truncated && path.points.size() == 50, "path incomplete");
    o.require(path.t == 1e-6 / 18.0, "unexpected barrier weight");
    double worst = 0.0;
    for (const auto& pt : path.points) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    worst = std::max(worst, std::abs(pt.X(i, i) - 1.0 / (d(i) + pt.rho)));
                } else {
                    o.require(pt.X(i, j) == 0.0, "off-diagonal entry in X");
                }
            }
        }
    }
    o.require(worst <= kDiagonalTol, fmt("max |X_ii - 1/(s_ii+rho)| = %.3e", worst));
    o.require(elapsed < kDiagonalSeconds, fmt("runtime %.2fs", elapsed));
    if (o.pass) o.detail = fmt("max error %.3e", worst);
    return o;
}

Outcome surrogate_gap() {
    Outcome o;
    const auto start = Clock::now();
    oracle::Rng rng(1001);
    const int n = 4;
    double worst = -1e300;
    for (int inst = 0; inst < 20; ++inst) {
        const auto p = random_problem(n, rng, 0.1, 0.9);
        // Newton continuation in t down to the proxy weight.
        SymMatrix U = start_for(p);
        std::vector<double> values;
        for (double t : {1e-2, 1e-3, 1e-4}) {
            CorrectorConfig cfg;
            cfg.tol_residual = 1e-10;
            const auto r = corrector_solve(p, U, t, cfg);
            U = r.U.matrix();
            values.push_back(dual_objective(r.U));
        }
        SymMatrix V = U;
        for (double t = 1e-5; t >= 1e-9 * 0.999; t *= 0.1) {
            OracleConfig oc;
            oc.tol = 1e-12;
            V = newton_solve(p, V, t, oc).matrix();
        }
        const double p_star = dual_objective(PDFactor::factor(V));
        int k = 0;
        for (double t : {1e-2, 1e-3, 1e-4}) {
            const double excess = values[k++] - p_star - 2.0 * n * n * t;
            worst = std::max(worst, excess);
            o.require(excess <= kSurrogateSlack, fmt("f - p* exceeds 2n^2 t by %.3e at t=%.0e", excess, t));
        }
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < kSurrogateSeconds, fmt("runtime %.2fs", elapsed));
    if (o.pass) o.detail = fmt("max (f - p*) - 2n^2 t = %.3e", worst);
    return o;
}

Outcome corrector_newton() {
    Outcome o;
    const auto start = Clock::now();
    oracle::Rng rng(1002);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const int n = rng.integer(2, 5);
        const auto p = random_problem(n, rng, 0.1, 0.9);
        const double t = barrier_weight(n, kDefaultGapTarget);
        CorrectorConfig cfg;
        cfg.tol_residual = 1e-10;
        const auto a = corrector_solve(p, start_for(p), t, cfg);
        const auto b = newton_solve(p, start_for(p), t);
        const double d = frobenius_distance(a.U.matrix(), b.matrix());
        worst = std::max(worst, d);
        o.require(d <= kEquivalenceTol, fmt("distance %.3e", d));
    }
    const double elapsed = seconds_since(start);
    o.require(elapsed < kEquivalenceSeconds, fmt("runtime %.2fs", elapsed));
    if (o.pass) o.detail = fmt("max distance %.3e", worst);
    return o;
}

Outcome closed_forms() {
    Outcome o;
    const auto start = Clock::now();
    oracle::Rng rng(1003);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double rho = rng.uniform(0.05, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        const double t = std::pow(10.0, rng.uniform(-6.0, 0.0));
        CoordCoefficients cc;
        cc.alpha = -std::pow(10.0, rng.uniform(-1.5, 1.5));
        cc.beta = rng.uniform(-3.0, 3.0);
        const double x0 = b + rho * rng.uniform(-0.95, 0.95);
        cc.gamma = std::pow(10.0, rng.uniform(-2.0, 1.0)) - cc.alpha * x0 * x0 - cc.beta * x0;
        const double disc = std::sqrt(cc.beta * cc.beta - 4.0 * cc.alpha * cc.gamma);
        const double r1 = (-cc.beta + disc) / (2.0 * cc.alpha), r2 = (-cc.beta - disc) / (2.0 * cc.alpha);
        const double lo = std::max(std::min(r1, r2), b - rho), hi = std::min(std::max(r1, r2), b + rho);
        const double x = solve_coordinate(cc, b, rho, t, x0);
        const double ref = golden_min([&](double y) { return coordinate_objective(cc, b, rho, t, y); }, lo, hi);
        const double err = std::abs(x - ref) / std::max(1.0, std::abs(ref));
        worst = std::max(worst, err);
        o.require(err <= kGoldenTol, fmt("coordinate error %.3e", err));
    }
    for (int trial = 0; trial < 1000; ++trial) {
        const double rho = rng.uniform(0.05, 2.0);
        const double c = rng.uniform(0.1, 3.0);
        const double s = c + rho * rng.uniform(-3.0, 0.95);
        const double t = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double w = solve_diagonal(s, c, rho, t);
        const double ref =
            golden_min([&](double y) { return diagonal_objective(s, c, rho, t, y); }, std::max(s, c - rho), c + rho);
        const double err = std::abs(w - ref) / std::max(1.0, std::abs(ref));
        worst = std::max(worst, err);
        o.require(err <= kGoldenTol, fmt("diagonal error %.3e", err));
    }
    // Symmetric coordinate problem: alpha = -1, beta = 0, b = 0.
    const double x = solve_coordinate(CoordCoefficients{-1.0, 0.0, 1.0}, 0.0, 1.0, 0.5, 0.3);
    o.require(x == 0.0, fmt("symmetric coordinate root %.3e", x));
    const double w = solve_diagonal(0.0, 0.0, 1.0, 0.5);
    o.require(w == 1.0 / std::sqrt(2.0), fmt("symmetric diagonal root off by %.3e", w - 1.0 / std::sqrt(2.0)));
    const double elapsed = seconds_since(start);
    o.require(elapsed < kClosedFormSeconds, fmt("runtime %.2fs", elapsed));
    if (o.pass) o.detail = fmt("max relative error %.3e", worst);
    return o;
}

Outcome predictor_system() {
    Outcome o;
    const auto start = Clock::now();
    oracle::Rng rng(1004);
    const double t = 1e-2, step = 1e-5;
    double worst_mv = 0.0, worst_fd = 0.0, worst_cg = 0.0;
    for (int n = 2; n <= 6; ++n) {
        const auto p = random_problem(n, rng, 0.2, 0.8);
        CorrectorConfig cfg;
        cfg.tol_residual = 1e-8;
        const auto U = corrector_solve(p, start_for(p), t, cfg).U;
        const auto sys = build_system(p, U, t);
        const MatrixXd A = explicit_system(p, U, t);
        // Explicit Kronecker operator built independently of the library.
        const MatrixXd& X = U.inverse().dense();
        MatrixXd K(n * n, n * n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) K.block(a * n, b * n, n, n) = X(a, b) * X;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) K(i + n * j, i + n * j) += sys.D(i, j);
        for (int trial = 0; trial < 5; ++trial) {
            const SymMatrix P = dense(oracle::random_symmetric(n, rng));
            const double e = (K * vec(P.dense()) - vec(matvec(sys, P).dense())).norm() /
                             std::max(1.0, K.norm() * frobenius_norm(P));
            worst_mv = std::max(worst_mv, e);
        }
        worst_mv = std::max(worst_mv, (A - K).norm() / std::max(1.0, K.norm()));

        auto H = [&](const Problem& q, const SymMatrix& V) {
            return oracle::central_residual(q.sigma().dense(), q.rho(), V.dense(), t);
        };
        const MatrixXd dH = (H(p.with_rho(p.rho() + step), U.matrix()) - H(p.with_rho(p.rho() - step), U.matrix())) /
                            (2.0 * step);
        worst_fd = std::max(worst_fd, (dH + sys.rhs.dense()).norm() / (1.0 + sys.rhs.dense().norm()));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                SymMatrix e(n);
                e.set(i, j, 1.0);
                const MatrixXd col = (H(p, U.matrix() + step * e) - H(p, U.matrix() - step * e)) / (2.0 * step);
                const MatrixXd expect = matvec(sys, e).dense();
                worst_fd = std::max(worst_fd, (col - expect).norm() / (1.0 + expect.norm()));
            }
        }

        CGConfig tight;
        tight.rel_drop = 1e-10;
        tight.max_iters = 1000;
        const auto sol = cg_solve(sys, tight);
        const VectorXd ref = K.ldlt().solve(vec(sys.rhs.dense()));
        worst_cg = std::max(worst_cg, (vec(sol.direction.dense()) - ref).norm() / ref.norm());
    }
    o.require(worst_mv <= kMatvecTol, fmt("matvec error %.3e", worst_mv));
    o.require(worst_fd <= kFiniteDifferenceTol, fmt("finite difference error %.3e", worst_fd));
    o.require(worst_cg <= kDenseSolveTol, fmt("CG relative error %.3e", worst_cg));
    const double elapsed = seconds_since(start);
    o.require(elapsed < kPredictorSeconds, fmt("runtime %.2fs", elapsed));
    if (o.pass) {
        o.detail = fmt("matvec %.1e, finite differences %.1e", worst_mv, worst_fd) + fmt(", CG %.1e", worst_cg);
    }
    return o;
}

Outcome swm_integrity() {
    Outcome o;
    const auto g = generate_problem({50, 0.1, 6, 0.1});
    PathConfig cfg;
    cfg.corrector.refresh_interval = 10;
    const auto path = run_path(g.sigma, cfg);
    o.require(!path.truncated && path.points.size() == 50, "path incomplete");
    double worst = 0.0;
    for (const auto& pt : path.points) worst = std::max(worst, pt.inverse_drift);
    o.require(worst <= kDriftTol, fmt("drift %.3e", worst));
    if (o.pass) o.detail = fmt("max drift %.3e", worst);
    return o;
}

struct LargePath {
    RegularizationPath path;
    double seconds = 0.0;
};

const LargePath& large_path() {
    static const LargePath lp = [] {
        const auto g = generate_problem({100, 0.1, 7, 0.1});
        PathConfig cfg;
        cfg.mode = WarmStart::predictor;
        const auto start = Clock::now();
        LargePath r{run_path(g.sigma, cfg), 0.0};
        r.seconds = seconds_since(start);
        return r;
    }();
    return lp;
}

Outcome path_trends() {
    Outcome o;
    const auto& path = large_path().path;
    o.require(!path.truncated && path.points.size() == 50, "path incomplete");
    if (!o.pass) return o;
    for (std::size_t k = 1; k < path.points.size(); ++k) {
        o.require(path.points[k].cardinality >= path.points[k - 1].cardinality,
                  fmt("cardinality decreases at rho=%.4g", path.points[k].rho));
    }
    // Points are ordered by decreasing rho, so the first fifth is the sparsest.
    std::vector<double> sparse, dense_cg;
    for (std::size_t k = 0; k < 10; ++k) sparse.push_back(path.points[k].cg_iterations);
    for (std::size_t k = 40; k < 50; ++k) dense_cg.push_back(path.points[k].cg_iterations);
    const double ms = median(sparse), md = median(dense_cg);
    o.require(ms <= md, fmt("CG medians sparse %.1f > dense %.1f", ms, md));
    if (o.pass) {
        o.detail = fmt("cardinality %.0f -> %.0f", static_cast<double>(path.points.front().cardinality),
                       static_cast<double>(path.points.back().cardinality)) +
                   fmt(", CG medians %.1f / %.1f", ms, md);
    }
    return o;
}

Outcome online_equivalence() {
    Outcome o;
    const auto g = generate_problem({10, 0.2, 8, 0.1});
    const double rho = 0.5 * rho_max(g.sigma);
    const Problem p(g.sigma, rho);
    const double t = barrier_weight(10, kDefaultGapTarget);
    CorrectorConfig tight;
    tight.tol_residual = 1e-10;
    const auto base = corrector_solve(p, start_for(p), t, tight);
    const SymMatrix& U_star = base.U.matrix();

    const auto same = run_online(p, U_star, SymMatrix(10), t);
    o.require(same.U.matrix() == U_star, "C = 0 changed the input");

    oracle::Rng rng(1008);
    OnlineConfig oc;
    oc.corrector = tight;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXd c = oracle::random_symmetric(10, rng);
        c *= 1e-3 * frobenius_norm(g.sigma) / c.norm();
        const SymMatrix C = dense(c);
        const auto online = run_online(p, U_star, C, t, oc);
        const Problem shifted(g.sigma + C, rho);
        const auto scratch_solve = corrector_solve(shifted, start_for(shifted), t, tight);
        const double d = frobenius_distance(online.U.matrix(), scratch_solve.U.matrix());
        worst = std::max(worst, d);
        o.require(d <= kOnlineTol, fmt("online vs from-scratch %.3e", d));
    }
    if (o.pass) o.detail = fmt("max distance %.3e", worst);
    return o;
}

Outcome performance() {
    Outcome o;
    const auto& lp = large_path();
    o.require(!lp.path.truncated && lp.path.points.size() == 50, "path incomplete");
    o.require(lp.seconds < kPathSeconds, fmt("n=100 path took %.1fs", lp.seconds));
    const auto dir = scratch("bench");
    const int code = cli_run({"bench", "--sizes", "20,50,100,200", "--lengths", "50", "--instances", "3", "--seed", "1",
                              "--output", dir.string()});
    o.require(code == 0, "bench exited with " + std::to_string(code));
    if (code != 0) return o;
    const auto rep = json::parse(read_text(dir / "bench_report.json"));
    std::string medians;
    double prev = -1.0;
    for (const auto& cell : rep["cells"]) {
        const double m = cell["median_wall_time"].get<double>();
        o.require(m > prev, "medians not increasing in n");
        o.require(cell["truncated_runs"].get<int>() == 0, "truncated bench run");
        prev = m;
        medians += (medians.empty() ? "" : ", ") + fmt("n=%.0f %.2fs", cell["n"].get<double>(), m);
    }
    if (o.pass) o.detail = fmt("n=100 path %.1fs; medians ", lp.seconds) + medians;
    return o;
}

Outcome determinism() {
    Outcome o;
    std::vector<std::string> summaries;
    for (const char* name : {"det_a", "det_b"}) {
        const auto dir = scratch(name);
        const int code = cli_run({"solve", "--gen", "n=30,density=0.1,seed=10", "--points", "20", "--mode",
                                  "predictor", "--output", dir.string()});
        o.require(code == 0, "solve exited with " + std::to_string(code));
        summaries.push_back(read_text(dir / "summary.json"));
    }
    o.require(summaries[0] == summaries[1], "summaries differ");
    if (o.pass) o.detail = std::to_string(summaries[0].size()) + " bytes identical";
    return o;
}

}  // namespace

int main() {
    report(1, "diagonal closed form", diagonal_closed_form);
    report(2, "surrogate gap", surrogate_gap);
    report(3, "corrector-Newton equivalence", corrector_newton);
    report(4, "cubic and quadratic closed forms", closed_forms);
    report(5, "predictor system", predictor_system);
    report(6, "inverse update integrity", swm_integrity);
    report(7, "path trends", path_trends);
    report(8, "online equivalence", online_equivalence);
    report(9, "performance", performance);
    report(10, "determinism", determinism);
    return failures == 0 ? 0 : 1;
}
