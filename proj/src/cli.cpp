#include "covpath/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "covpath/barrier.hpp"
#include "covpath/errors.hpp"
#include "covpath/io.hpp"
#include "covpath/path.hpp"
#include "covpath/reference.hpp"

namespace covpath::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSummarySchema = "covpath.run_summary/1";
constexpr const char* kTimingSchema = "covpath.timing/1";
constexpr const char* kOnlineSchema = "covpath.online_summary/1";
constexpr const char* kBenchSchema = "covpath.bench_report/1";
constexpr const char* kVerifySchema = "covpath.verify_report/1";

// Largest Newton problem the verifier cross-checks against.
constexpr Index kNewtonCheckMaxN = 30;
constexpr double kOnlineVerifyTolerance = 1e-6;
constexpr double kOnlineDefaultResidual = 1e-9;

struct SolveOptions {
    std::string sigma_file;
    std::string samples_file;
    std::string gen;
    std::uint64_t seed = 1;
    int points = 50;
    double rho_min_frac = 0.01;
    double gap_target = kDefaultGapTarget;
    std::string mode = "scaling";
    double zero_tol = kDefaultZeroTol;
    double sweep_fraction = 1.0;
    double tol_residual = 0.0;
    std::string output = "covpath-out";
    bool verify = false;
    bool write_matrices = false;
};

struct OnlineOptions {
    std::string state_file;
    std::string perturbation_file;
    int k = 1;
    double tol_residual = kOnlineDefaultResidual;
    std::string output = "covpath-online";
    bool verify = false;
};

struct BenchOptions {
    std::vector<Index> sizes{20, 50, 100, 200};
    std::vector<int> lengths{10, 50};
    int instances = 3;
    double density = 0.1;
    std::uint64_t seed = 1;
    double gap_target = kDefaultGapTarget;
    std::string mode = "scaling";
    std::string output = "covpath-bench";
};

struct VerifyOptions {
    std::string output = "covpath-out";
};

WarmStart parse_mode(const std::string& mode) {
    if (mode == "scaling") return WarmStart::scaling;
    if (mode == "predictor") return WarmStart::predictor;
    throw InputError("--mode must be 'scaling' or 'predictor', got '" + mode + "'");
}

const char* mode_name(WarmStart m) { return m == WarmStart::scaling ? "scaling" : "predictor"; }

std::string matrix_name(const char* prefix, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu.csv", prefix, k);
    return buf;
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

json read_json(const fs::path& file) {
    try {
        return json::parse(read_text(file));
    } catch (const json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double offdiag_density(const SymMatrix& m) {
    const Index n = m.size();
    if (n < 2) return 0.0;
    Index nz = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (m(i, j) != 0.0) ++nz;
    return static_cast<double>(nz) / static_cast<double>(n * (n - 1) / 2);
}

int cmd_solve(const SolveOptions& o, std::ostream& out) {
    const int sources = !o.sigma_file.empty() + !o.samples_file.empty() + !o.gen.empty();
    if (sources != 1) throw InputError("solve: give exactly one of --sigma, --samples, --gen");

    SymMatrix sigma;
    json instance;
    if (!o.sigma_file.empty()) {
        sigma = load_covariance(o.sigma_file);
        instance["source"] = "sigma";
        instance["file"] = o.sigma_file;
        instance["seed"] = nullptr;
    } else if (!o.samples_file.empty()) {
        const MatrixXd data = read_csv(o.samples_file);
        sigma = sample_covariance(data);
        instance["source"] = "samples";
        instance["file"] = o.samples_file;
        instance["samples"] = data.rows();
        instance["seed"] = nullptr;
    } else {
        const auto spec = parse_gen_spec(o.gen, o.seed);
        auto gp = generate_problem(spec);
        sigma = gp.sigma;
        instance["source"] = "gen";
        instance["seed"] = spec.seed;
        instance["density"] = spec.density;
        instance["achieved_density"] = offdiag_density(gp.ground_truth);
        instance["identity_shift_margin"] = spec.identity_shift_margin;
    }
    const Index n = sigma.size();
    instance["n"] = n;

    PathConfig cfg;
    cfg.points = o.points;
    cfg.rho_min_frac = o.rho_min_frac;
    cfg.gap_target = o.gap_target;
    cfg.mode = parse_mode(o.mode);
    cfg.zero_tol = o.zero_tol;
    if (!(o.zero_tol >= 0.0 && o.zero_tol < 1.0)) throw InputError("--zero-tol must lie in [0, 1)");
    if (!(o.sweep_fraction > 0.0 && o.sweep_fraction <= 1.0)) throw InputError("--sweep-fraction must lie in (0, 1]");
    if (!(o.gap_target > 0.0)) throw InputError("--gap-target must be positive");
    cfg.corrector.sweep_fraction = o.sweep_fraction;
    cfg.corrector.tol_residual = o.tol_residual;

    const auto path = run_path(sigma, cfg);

    const fs::path dir(o.output);
    fs::create_directories(dir);
    write_csv(dir / "sigma.csv", sigma.dense());

    const bool matrices = o.write_matrices || o.verify;
    json summary;
    summary["schema"] = kSummarySchema;
    summary["instance"] = instance;
    summary["config"] = {
        {"points", o.points},
        {"rho_min_frac", o.rho_min_frac},
        {"gap_target", o.gap_target},
        {"t", path.t},
        {"mode", mode_name(cfg.mode)},
        {"zero_tol", o.zero_tol},
        {"sweep_fraction", o.sweep_fraction},
        {"tol_residual", cfg.corrector.residual_tolerance(n)},
        {"rho_max", rho_max(sigma)},
    };
    json points = json::array();
    json timing = json::array();
    std::string edges = "point,rho,i,j,value\n";
    std::string plot_card = "log_rho,cardinality_fraction\n";
    std::string plot_cg = "cardinality,cg_iterations\n";
    char buf[128];
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        const auto& pt = path.points[k];
        json rec = {
            {"index", k},
            {"rho", pt.rho},
            {"t", path.t},
            {"cardinality", pt.cardinality},
            {"dual_obj", pt.dual_obj},
            {"primal_obj", pt.primal_obj},
            {"gap_bound", pt.gap_bound},
            {"residual_norm", pt.residual_norm},
            {"cg_iterations", pt.cg_iterations},
            {"sweeps", pt.sweeps},
        };
        if (matrices) {
            rec["U_file"] = matrix_name("U", k);
            rec["X_file"] = matrix_name("X", k);
            write_csv(dir / matrix_name("U", k), pt.U.dense());
            write_csv(dir / matrix_name("X", k), pt.X.dense());
        }
        points.push_back(std::move(rec));
        timing.push_back({{"index", k}, {"rho", pt.rho}, {"wall_time", pt.wall_time}});

        const double cutoff = o.zero_tol * max_abs(pt.X);
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (std::abs(pt.X(i, j)) > cutoff) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%ld,%ld,%.17g\n", k, pt.rho, static_cast<long>(i),
                                  static_cast<long>(j), pt.X(i, j));
                    edges += buf;
                }
            }
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", std::log(pt.rho),
                      static_cast<double>(pt.cardinality) / static_cast<double>(n * n));
        plot_card += buf;
        std::snprintf(buf, sizeof buf, "%ld,%d\n", static_cast<long>(pt.cardinality), pt.cg_iterations);
        plot_cg += buf;
    }
    summary["points"] = std::move(points);
    json failures = json::array();
    for (const auto& f : path.failures) failures.push_back({{"rho", f.rho}, {"message", f.message}, {"recovered", f.recovered}});
    summary["failures"] = std::move(failures);
    summary["truncated"] = path.truncated;

    write_json(dir / "summary.json", summary);
    write_json(dir / "timing.json", {{"schema", kTimingSchema}, {"points", timing}});
    write_text(dir / "edges.csv", edges);
    write_text(dir / "plot_cardinality.csv", plot_card);
    write_text(dir / "plot_cg.csv", plot_cg);
    if (!path.points.empty()) {
        const auto& last = path.points.back();
        write_state(dir / "state.json", {last.rho, path.t, sigma, last.U});
    }

    out << "n=" << n << " t=" << path.t << " points=" << path.points.size() << "/" << path.grid.size()
        << " mode=" << mode_name(cfg.mode) << "\n";
    for (const auto& pt : path.points) {
        std::snprintf(buf, sizeof buf, "rho=%.6g card=%ld sweeps=%d cg=%d residual=%.3g\n", pt.rho,
                      static_cast<long>(pt.cardinality), pt.sweeps, pt.cg_iterations, pt.residual_norm);
        out << buf;
    }
    for (const auto& f : path.failures) {
        out << "failure rho=" << f.rho << (f.recovered ? " (recovered): " : ": ") << f.message << "\n";
    }

    if (path.points.empty()) throw NumericalBreakdown("solve: no path point could be computed");

    if (o.verify) {
        const auto report = verify_directory(dir);
        for (const auto& m : report.messages) out << m << "\n";
        out << "verify: " << report.points << " points, " << report.failures << " failures\n";
        if (!report.ok()) return kNumericalFailure;
    }
    return path.truncated ? kPartialPath : kSuccess;
}

SymMatrix from_scratch(const SymMatrix& sigma, double rho, double t, const CorrectorConfig& cc) {
    const double rmax = rho_max(sigma);
    SymMatrix start = initial_point(sigma);
    if (rho < rmax) start = scaling_warm_start(sigma, start, rmax, rho);
    return corrector_solve(Problem(sigma, rho), start, t, cc).U.matrix();
}

int cmd_online(const OnlineOptions& o, std::ostream& out) {
    const auto state = read_state(o.state_file);
    const SymMatrix C = load_symmetric(o.perturbation_file);
    if (C.size() != state.sigma.size()) throw InputError("online: perturbation size does not match the state");
    if (o.k < 1) throw InputError("--k must be at least 1");

    const Problem p(state.sigma, state.rho);
    OnlineConfig cfg;
    cfg.k = o.k;
    cfg.corrector.tol_residual = o.tol_residual;
    OnlineResult res = [&] {
        try {
            return run_online(p, state.U, C, state.t, cfg);
        } catch (const Infeasible& e) {
            throw Infeasible(std::string(e.what()) + " (retry with a larger --k)");
        }
    }();

    const SymMatrix sigma_next = state.sigma + C;
    const Problem next(sigma_next, state.rho);
    const double residual_norm = residual(next, res.U, state.t).norm();

    const fs::path dir(o.output);
    fs::create_directories(dir);
    write_state(dir / "state.json", {state.rho, state.t, sigma_next, res.U.matrix()});
    write_csv(dir / "U.csv", res.U.matrix().dense());
    write_csv(dir / "X.csv", res.U.inverse().dense());

    json summary;
    summary["schema"] = kOnlineSchema;
    summary["n"] = state.sigma.size();
    summary["rho"] = state.rho;
    summary["t"] = state.t;
    summary["k"] = o.k;
    summary["perturbation_norm"] = frobenius_norm(C);
    summary["steps"] = res.steps;
    summary["halvings"] = res.halvings;
    summary["cg_iterations"] = res.cg_iterations;
    summary["sweeps"] = res.sweeps;
    summary["residual_norm"] = residual_norm;
    summary["tol_residual"] = o.tol_residual;

    int code = kSuccess;
    if (o.verify) {
        const SymMatrix fresh = from_scratch(sigma_next, state.rho, state.t, cfg.corrector);
        const double gap = frobenius_distance(fresh, res.U.matrix());
        const bool pass = gap <= kOnlineVerifyTolerance;
        summary["verify"] = {{"discrepancy", gap}, {"tolerance", kOnlineVerifyTolerance}, {"pass", pass}};
        out << "verify: from-scratch discrepancy " << gap << (pass ? " (pass)" : " (FAIL)") << "\n";
        if (!pass) code = kNumericalFailure;
    }
    write_json(dir / "online_summary.json", summary);
    out << "online: steps=" << res.steps << " halvings=" << res.halvings << " cg=" << res.cg_iterations
        << " sweeps=" << res.sweeps << " residual=" << residual_norm << "\n";
    return code;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    if (o.instances < 1) throw InputError("--instances must be at least 1");
    if (o.sizes.empty() || o.lengths.empty()) throw InputError("bench: empty --sizes or --lengths");
    const WarmStart mode = parse_mode(o.mode);

    json cells = json::array();
    std::vector<std::vector<double>> medians(o.lengths.size());
    for (const Index n : o.sizes) {
        for (std::size_t li = 0; li < o.lengths.size(); ++li) {
            const int len = o.lengths[li];
            std::vector<double> times, sweeps;
            int truncated = 0;
            for (int inst = 0; inst < o.instances; ++inst) {
                GeneratorSpec spec;
                spec.n = n;
                spec.density = o.density;
                spec.seed = o.seed + static_cast<std::uint64_t>(inst);
                const auto gp = generate_problem(spec);
                PathConfig cfg;
                cfg.points = len;
                cfg.gap_target = o.gap_target;
                cfg.mode = mode;
                const auto t0 = std::chrono::steady_clock::now();
                const auto path = run_path(gp.sigma, cfg);
                times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
                double s = 0.0;
                for (const auto& pt : path.points) s += pt.sweeps;
                sweeps.push_back(s);
                truncated += path.truncated ? 1 : 0;
            }
            const double med = median(times);
            medians[li].push_back(med);
            cells.push_back({{"n", n},
                             {"points", len},
                             {"instances", o.instances},
                             {"wall_times", times},
                             {"median_wall_time", med},
                             {"median_total_sweeps", median(sweeps)},
                             {"truncated_runs", truncated}});
            char buf[128];
            std::snprintf(buf, sizeof buf, "n=%ld points=%d median=%.3fs\n", static_cast<long>(n), len, med);
            out << buf << std::flush;
        }
    }
    json trends = json::array();
    for (std::size_t li = 0; li < o.lengths.size(); ++li) {
        const bool increasing = std::adjacent_find(medians[li].begin(), medians[li].end(),
                                                   [](double a, double b) { return !(a < b); }) == medians[li].end();
        trends.push_back({{"points", o.lengths[li]}, {"medians_increasing_in_n", increasing}});
    }
    json report;
    report["schema"] = kBenchSchema;
    report["config"] = {{"sizes", o.sizes},     {"lengths", o.lengths}, {"instances", o.instances},
                        {"density", o.density}, {"seed", o.seed},       {"gap_target", o.gap_target},
                        {"mode", mode_name(mode)}};
    report["cells"] = std::move(cells);
    report["trends"] = std::move(trends);
    const fs::path dir(o.output);
    fs::create_directories(dir);
    write_json(dir / "bench_report.json", report);
    return kSuccess;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    const auto report = verify_directory(o.output);
    for (const auto& m : report.messages) out << m << "\n";
    out << "verify: " << report.points << " points, " << report.failures << " failures\n";
    return report.ok() ? kSuccess : kNumericalFailure;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
    std::vector<T> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            values.push_back(static_cast<T>(v));
        } catch (const std::exception&) {
            throw InputError(std::string(flag) + ": expected positive integers, got '" + item + "'");
        }
    }
    if (values.empty()) throw InputError(std::string(flag) + ": empty list");
    return values;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

GeneratorSpec parse_gen_spec(const std::string& text, std::uint64_t default_seed) {
    GeneratorSpec spec;
    spec.seed = default_seed;
    bool have_n = false;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("--gen: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            std::size_t used = 0;
            if (key == "n") {
                const long long v = std::stoll(value, &used);
                if (v < 2) throw InputError("--gen: n must be at least 2");
                spec.n = static_cast<Index>(v);
                have_n = true;
            } else if (key == "density") {
                spec.density = std::stod(value, &used);
            } else if (key == "seed") {
                spec.seed = std::stoull(value, &used);
            } else if (key == "margin") {
                spec.identity_shift_margin = std::stod(value, &used);
            } else {
                throw InputError("--gen: unknown key '" + key + "'");
            }
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw InputError("--gen: bad value for '" + key + "': '" + value + "'");
        }
    }
    if (!have_n) throw InputError("--gen: n is required");
    if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw InputError("--gen: density must lie in [0, 1]");
    return spec;
}

VerifyReport verify_directory(const fs::path& dir) {
    const json summary = read_json(dir / "summary.json");
    if (summary.value("schema", "") != kSummarySchema) throw ParseError("verify: unknown summary schema");
    const SymMatrix sigma = load_covariance(dir / "sigma.csv");
    const Index n = sigma.size();
    const auto& config = summary.at("config");
    const double tol = config.at("tol_residual").get<double>();
    const double zero_tol = config.at("zero_tol").get<double>();

    VerifyReport report;
    json records = json::array();
    char buf[256];
    for (const auto& rec : summary.at("points")) {
        ++report.points;
        const double rho = rec.at("rho").get<double>();
        const double t = rec.at("t").get<double>();
        std::vector<std::string> problems;
        json checks;
        if (!rec.contains("U_file")) {
            problems.push_back("matrices were not written (rerun solve with --write-matrices)");
        } else {
            const Problem p(sigma, rho);
            const SymMatrix U = load_covariance(dir / rec.at("U_file").get<std::string>());
            if (U.size() != n) throw ParseError("verify: matrix size mismatch");
            if (!feasible(p, U)) {
                problems.push_back("U is not strictly feasible");
            } else {
                const auto f = PDFactor::factor(U);
                const double h = residual(p, f, t).norm();
                const double dual = dual_objective(f);
                const double primal = primal_objective(p, f.inverse());
                const double gap = dual - primal;
                const double slack = 1e-9 * (1.0 + std::abs(dual));
                const Index card = cardinality(f.inverse(), zero_tol);
                checks = {{"residual_norm", h}, {"dual_obj", dual}, {"primal_obj", primal}, {"gap", gap},
                          {"cardinality", card}};
                if (!(h <= tol)) problems.push_back("residual above tolerance");
                if (!(primal <= dual + slack)) problems.push_back("weak duality violated");
                if (!(gap <= gap_bound(n, t) + slack)) problems.push_back("gap above 2 n^2 t");
                if (card != rec.at("cardinality").get<Index>()) problems.push_back("cardinality mismatch");
                if (n <= kNewtonCheckMaxN) {
                    try {
                        NewtonStats stats;
                        const auto ref = newton_solve(p, U, t, {}, &stats);
                        const double dist = frobenius_distance(ref.matrix(), U);
                        // Strong convexity: the Hessian is at least lambda_min(U^{-1})^2.
                        const double lmin =
                            Eigen::SelfAdjointEigenSolver<MatrixXd>(f.inverse().dense(), Eigen::EigenvaluesOnly)
                                .eigenvalues()(0);
                        const double bound = 2.0 * (h + stats.residual_norm) / (lmin * lmin) + 1e-12;
                        checks["newton_distance"] = dist;
                        checks["newton_bound"] = bound;
                        if (!(dist <= bound)) problems.push_back("far from the Newton solution");
                    } catch (const NumericalError& e) {
                        problems.push_back(std::string("Newton check failed: ") + e.what());
                    }
                }
            }
        }
        std::snprintf(buf, sizeof buf, "point %d rho=%.6g: %s", report.points - 1, rho, problems.empty() ? "ok" : "");
        std::string line = buf;
        for (std::size_t k = 0; k < problems.size(); ++k) line += (k ? "; " : "") + problems[k];
        report.messages.push_back(line);
        if (!problems.empty()) ++report.failures;
        checks["problems"] = problems;
        checks["rho"] = rho;
        records.push_back(std::move(checks));
    }
    write_json(dir / "verify.json", {{"schema", kVerifySchema},
                                     {"points", report.points},
                                     {"failures", report.failures},
                                     {"records", std::move(records)}});
    return report;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regularization path for sparse inverse covariance selection", "covpath"};
    app.require_subcommand(1);

    SolveOptions so;
    auto* solve = app.add_subcommand("solve", "Compute the regularization path");
    solve->add_option("--sigma", so.sigma_file, "Covariance matrix CSV");
    solve->add_option("--samples", so.samples_file, "Data matrix CSV, one sample per row");
    solve->add_option("--gen", so.gen, "Random instance, e.g. n=30,density=0.1,seed=1");
    solve->add_option("--seed", so.seed, "Generator seed when --gen omits one");
    solve->add_option("--points", so.points, "Number of penalties on the default grid")->check(CLI::PositiveNumber);
    solve->add_option("--rho-min-frac", so.rho_min_frac, "Smallest penalty as a fraction of rho_max");
    solve->add_option("--gap-target", so.gap_target, "Duality gap target 2 n^2 t");
    solve->add_option("--mode", so.mode, "Warm start: scaling or predictor");
    solve->add_option("--zero-tol", so.zero_tol, "Relative threshold for nonzero entries");
    solve->add_option("--sweep-fraction", so.sweep_fraction, "Fraction of rows visited per corrector sweep");
    solve->add_option("--tol-residual", so.tol_residual, "Corrector residual tolerance (default 1e-6 n)");
    solve->add_option("--output", so.output, "Output directory");
    solve->add_flag("--verify", so.verify, "Re-validate the written solution");
    solve->add_flag("--write-matrices", so.write_matrices, "Write U and X for every point");

    OnlineOptions oo;
    auto* online = app.add_subcommand("online", "Re-solve after a covariance perturbation");
    online->add_option("--state", oo.state_file, "state.json from a previous run")->required();
    online->add_option("--perturbation", oo.perturbation_file, "Symmetric perturbation CSV")->required();
    online->add_option("--k", oo.k, "Number of continuation steps");
    online->add_option("--tol-residual", oo.tol_residual, "Corrector residual tolerance");
    online->add_option("--output", oo.output, "Output directory");
    online->add_flag("--verify", oo.verify, "Compare against a from-scratch solve");

    BenchOptions bo;
    std::string sizes, lengths;
    auto* bench = app.add_subcommand("bench", "Time the path on generated instances");
    bench->add_option("--sizes", sizes, "Comma-separated dimensions (default 20,50,100,200)");
    bench->add_option("--lengths", lengths, "Comma-separated path lengths (default 10,50)");
    bench->add_option("--instances", bo.instances, "Instances per cell");
    bench->add_option("--seed", bo.seed, "Seed of the first instance");
    bench->add_option("--gap-target", bo.gap_target, "Duality gap target 2 n^2 t");
    bench->add_option("--mode", bo.mode, "Warm start: scaling or predictor");
    bench->add_option("--output", bo.output, "Output directory");

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Re-validate a solve output directory");
    verify->add_option("--output", vo.output, "Directory written by solve --write-matrices");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (solve->parsed()) return cmd_solve(so, out);
        if (online->parsed()) return cmd_online(oo, out);
        if (bench->parsed()) {
            if (!sizes.empty()) bo.sizes = parse_list<Index>(sizes, "--sizes");
            if (!lengths.empty()) bo.lengths = parse_list<int>(lengths, "--lengths");
            return cmd_bench(bo, out);
        }
        return cmd_verify(vo, out);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputFailure;
    } catch (const InputError& e) {
        report_error(err, "input", e.what());
        return kInputFailure;
    } catch (const NumericalError& e) {
        report_error(err, "numerical", e.what());
        return kNumericalFailure;
    } catch (const fs::filesystem_error& e) {
        report_error(err, "input", e.what());
        return kInputFailure;
    }
}

}  // namespace covpath::cli
