#include "covpath/path.hpp"

#include <chrono>
#include <cmath>

#include "covpath/errors.hpp"

namespace covpath {

std::vector<double> default_grid(double rho_max, int points, double rho_min_frac) {
    if (points < 1) throw InputError("default_grid: need at least one point");
    if (!(rho_min_frac > 0.0 && rho_min_frac <= 1.0)) throw InputError("default_grid: rho_min_frac must lie in (0, 1]");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    grid.push_back(rho_max);
    const double log_span = std::log(rho_min_frac);
    for (int k = 1; k < points; ++k) {
        grid.push_back(rho_max * std::exp(log_span * static_cast<double>(k) / static_cast<double>(points - 1)));
    }
    return grid;
}

namespace {

void check_grid(const std::vector<double>& grid, double rmax) {
    if (grid.empty()) throw InputError("run_path: empty penalty grid");
    if (grid.front() > rmax) throw InputError("run_path: first penalty exceeds rho_max");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0.0)) throw InputError("run_path: penalties must be positive");
        if (k > 0 && !(grid[k] < grid[k - 1])) throw InputError("run_path: penalty grid must be strictly descending");
    }
}

PathPoint make_point(const Problem& p, CorrectorResult&& solved, double t, double zero_tol) {
    PathPoint pt;
    pt.rho = p.rho();
    pt.U = solved.U.matrix();
    pt.X = solved.U.inverse();
    pt.cardinality = cardinality(pt.X, zero_tol);
    pt.dual_obj = dual_objective(solved.U);
    pt.primal_obj = primal_objective(p, pt.X);
    pt.gap_bound = gap_bound(p.size(), t);
    pt.residual_norm = solved.residual_norm;
    pt.sweeps = solved.sweeps;
    pt.inverse_drift = solved.max_inverse_drift;
    return pt;
}

}  // namespace

RegularizationPath run_path(const SymMatrix& sigma, const PathConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const Index n = sigma.size();
    const double rmax = rho_max(sigma);

    RegularizationPath path;
    path.t = cfg.t > 0.0 ? cfg.t : barrier_weight(n, cfg.gap_target);
    path.grid = cfg.rho_grid.empty() ? default_grid(rmax, cfg.points, cfg.rho_min_frac) : cfg.rho_grid;
    check_grid(path.grid, rmax);
    const double t = path.t;

    // The diagonal start sits at rho_max; scale it down if the grid starts lower.
    SymMatrix start = initial_point(sigma, cfg.eps);
    if (path.grid.front() < rmax) start = scaling_warm_start(sigma, start, rmax, path.grid.front());

    for (std::size_t k = 0; k < path.grid.size(); ++k) {
        const auto t0 = clock::now();
        const Problem p(sigma, path.grid[k]);
        int cg_iterations = 0;

        if (k > 0) {
            const PathPoint& prev = path.points.back();
            start = scaling_warm_start(sigma, prev.U, prev.rho, p.rho());
            if (cfg.mode == WarmStart::predictor) {
                try {
                    const auto prev_factor = PDFactor::factor(prev.U);
                    auto step = predictor_step(Problem(sigma, prev.rho), prev_factor, t, p.rho() - prev.rho, cfg.cg);
                    cg_iterations = step.cg.iterations;
                    start = std::move(step.U);
                } catch (const NumericalError& e) {
                    path.failures.push_back({p.rho(), std::string("predictor: ") + e.what(), true});
                }
            }
        }

        try {
            auto solved = corrector_solve(p, start, t, cfg.corrector);
            auto pt = make_point(p, std::move(solved), t, cfg.zero_tol);
            pt.cg_iterations = cg_iterations;
            pt.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
            path.points.push_back(std::move(pt));
            continue;
        } catch (const NumericalError& e) {
            path.failures.push_back({p.rho(), e.what(), false});
        }

        // Retry once through the midpoint penalty from a scaled start.
        const bool have_prev = !path.points.empty();
        const double rho_prev = have_prev ? path.points.back().rho : rmax;
        const SymMatrix U_prev = have_prev ? path.points.back().U : initial_point(sigma, cfg.eps);
        try {
            const double rho_mid = 0.5 * (rho_prev + p.rho());
            const Problem mid(sigma, rho_mid);
            auto mid_solved = corrector_solve(mid, scaling_warm_start(sigma, U_prev, rho_prev, rho_mid), t, cfg.corrector);
            const int mid_sweeps = mid_solved.sweeps;
            auto solved = corrector_solve(
                p, scaling_warm_start(sigma, mid_solved.U.matrix(), rho_mid, p.rho()), t, cfg.corrector);
            auto pt = make_point(p, std::move(solved), t, cfg.zero_tol);
            pt.sweeps += mid_sweeps;
            pt.cg_iterations = cg_iterations;
            pt.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
            path.points.push_back(std::move(pt));
            path.failures.back().recovered = true;
        } catch (const NumericalError& e) {
            path.failures.push_back({p.rho(), std::string("retry: ") + e.what(), false});
            path.truncated = true;
            break;
        }
    }
    return path;
}

CentralPathResidual online_residual(const Problem& p, const SymMatrix& C, double mu, const PDFactor& U, double t) {
    const Problem shifted(p.sigma() + mu * C, p.rho());
    return residual(shifted, U, t);
}

OnlineResult run_online(const Problem& p, const SymMatrix& U_star, const SymMatrix& C, double t,
                        const OnlineConfig& cfg) {
    if (cfg.k < 1) throw InputError("run_online: k must be at least 1");
    if (C.size() != p.size()) throw InputError("run_online: perturbation has the wrong dimension");
    if (max_abs(C) == 0.0) return {PDFactor::factor(U_star), 0, 0, 0, 0};

    auto shifted = [&](double mu) { return Problem(p.sigma() + mu * C, p.rho()); };
    if (!feasible(p, U_star)) throw Infeasible("run_online: starting solution is not feasible");

    OnlineResult out{PDFactor::factor(U_star), 0, 0, 0, 0};
    const double nominal = 1.0 / static_cast<double>(cfg.k);
    double mu = 0.0;
    while (mu < 1.0) {
        const Problem here = shifted(mu);
        const auto sys = build_online_system(here, out.U, t, C);
        const auto cg = cg_solve(sys, cfg.cg);
        out.cg_iterations += cg.iterations;

        double step = std::min(nominal, 1.0 - mu);
        for (;;) {
            const double mu_next = (mu + step >= 1.0 - 1e-15) ? 1.0 : mu + step;
            const Problem next = shifted(mu_next);
            const SymMatrix predicted = out.U.matrix() + (mu_next - mu) * cg.direction;
            if (feasible(next, predicted)) {
                auto solved = corrector_solve(next, predicted, t, cfg.corrector);
                out.sweeps += solved.sweeps;
                out.U = std::move(solved.U);
                mu = mu_next;
                ++out.steps;
                break;
            }
            step *= 0.5;
            ++out.halvings;
            if (step < cfg.min_step) {
                throw Infeasible("run_online: homotopy left the feasible region at mu = " + std::to_string(mu) +
                                 "; split the perturbation into smaller pieces");
            }
        }
    }
    return out;
}

}  // namespace covpath
