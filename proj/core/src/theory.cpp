#include "fedtrip/theory.hpp"

#include <algorithm>
#include <cmath>

#include "fedtrip/errors.hpp"
#include "fedtrip/objectives.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

std::optional<double> estimate_B(const QuadraticProblem& problem,
                                 const std::vector<ParamVector>& sample_points) {
    constexpr double kStationaryTol = 1e-9;
    std::optional<double> best;
    for (const auto& x : sample_points) {
        const double global_norm = l2_norm(problem.global_grad(x));
        if (global_norm <= kStationaryTol) continue;
        for (int k = 0; k < problem.num_clients(); ++k) {
            const double ratio = l2_norm(problem.client_grad(k, x)) / global_norm;
            if (!best || ratio > *best) best = ratio;
        }
    }
    return best;
}

ParamVector exact_local_solve(const QuadraticProblem& problem, int client,
                              const ParamVector& w_global, const ParamVector& w_hist,
                              double mu, double xi) {
    const std::size_t d = problem.dim();
    const SymMatrix regularized = problem.hessian(client).shifted(mu * (1.0 - xi));
    auto lower = regularized.cholesky();
    if (!lower)
        throw SingularityError("exact_local_solve: regularized Hessian is not positive definite");
    std::vector<double> rhs = problem.hessian(client).matvec(problem.center(client));
    for (std::size_t i = 0; i < d; ++i) rhs[i] += mu * w_global[i] - mu * xi * w_hist[i];
    return problem.point(regularized.solve_with_cholesky(*lower, rhs));
}

namespace {

std::vector<ParamVector> ball_points(const QuadraticProblem& problem, const ParamVector& center,
                                     double radius, int count, std::uint64_t seed) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::theory), 2}));
    std::vector<ParamVector> points;
    points.reserve(static_cast<std::size_t>(count));
    const std::size_t d = problem.dim();
    for (int i = 0; i < count; ++i) {
        // Uniform in the ball: gaussian direction scaled by r * u^(1/d).
        std::vector<double> v(d);
        double norm = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm += x * x;
        }
        norm = std::sqrt(norm);
        const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j)
            p[j] = center[j] + (norm > 0.0 ? v[j] / norm * r : 0.0);
        points.push_back(problem.point(std::move(p)));
    }
    return points;
}

struct TrajectoryRun {
    std::vector<DescentRound> rounds;
    std::vector<ParamVector> iterates;
};

TrajectoryRun run_rounds(const QuadraticProblem& problem, const ParamVector& w0, double mu,
                         double xi, double rho, int rounds) {
    TrajectoryRun run;
    const int n = problem.num_clients();
    ParamVector w_global = w0;
    // First-participation rule: histories start at the round-0 global model.
    std::vector<ParamVector> hist(static_cast<std::size_t>(n), w0);
    run.iterates.push_back(w_global);
    for (int t = 1; t <= rounds; ++t) {
        const double f_before = problem.global_value(w_global);
        const double grad_sq = l2_norm_sq(problem.global_grad(w_global));
        std::vector<ParamVector> locals;
        locals.reserve(static_cast<std::size_t>(n));
        double max_gamma = 0.0;
        for (int k = 0; k < n; ++k) {
            ParamVector w_new =
                exact_local_solve(problem, k, w_global, hist[static_cast<std::size_t>(k)], mu, xi);
            const auto gamma = gamma_inexactness(
                w_new, w_global, hist[static_cast<std::size_t>(k)], RegularizerParams{mu, xi},
                problem.client_grad(k, w_new), problem.client_grad(k, w_global));
            if (gamma) max_gamma = std::max(max_gamma, *gamma);
            locals.push_back(std::move(w_new));
        }
        ParamVector next = ParamVector::zeros(problem.layout());
        for (const auto& wl : locals) axpy(next, 1.0 / n, wl);
        for (int k = 0; k < n; ++k) hist[static_cast<std::size_t>(k)] = locals[static_cast<std::size_t>(k)];
        w_global = std::move(next);
        run.iterates.push_back(w_global);

        DescentRound rec;
        rec.round = t;
        rec.f_before = f_before;
        rec.f_after = problem.global_value(w_global);
        rec.grad_norm_sq = grad_sq;
        rec.bound = f_before - rho * grad_sq;
        rec.margin = rec.bound - rec.f_after;
        // Tiny slack for floating-point noise on hairline rounds.
        rec.satisfied = rec.f_after <= rec.bound + 1e-12 * std::max(1.0, std::fabs(f_before));
        rec.max_gamma = max_gamma;
        run.rounds.push_back(rec);
    }
    return run;
}

double rho_for(double mu, double L, double B) {
    return 1.0 / mu - L * B / (mu * mu) - L * B * B / (2.0 * mu * mu);
}

}  // namespace

DescentReport descent_check(const QuadraticProblem& problem, const DescentConfig& cfg) {
    DescentReport report;
    report.L = problem.smoothness_L();

    const ParamVector w_star = problem.global_minimizer();
    Rng rng(derive_seed({cfg.seed, static_cast<std::uint64_t>(StreamTag::theory), 3}));
    ParamVector w0 = ParamVector::zeros(problem.layout());
    for (std::size_t i = 0; i < w0.size(); ++i) w0[i] = w_star[i] + rng.uniform(-2.0, 2.0);

    const double radius = 2.0 * std::max(l2_norm(sub(w0, w_star)), 1e-6);
    std::vector<ParamVector> points = ball_points(problem, w_star, radius, cfg.ball_samples, cfg.seed);
    points.push_back(w0);
    double b_est = estimate_B(problem, points).value_or(1.0);

    // The trajectory may reveal larger dissimilarity than the initial ball
    // sample; rerun until the estimate is self-consistent (caps quickly
    // because larger mu shrinks the explored region).
    TrajectoryRun run;
    for (int pass = 0; pass < 4; ++pass) {
        report.B = b_est;
        report.mu = cfg.mu_factor * report.L * b_est * b_est;
        report.rho = rho_for(report.mu, report.L, report.B);
        report.rho_positive = report.rho > 0.0;
        // Theorem regime: h_k must stay mu-strongly convex, which bounds the
        // admissible constant xi by lambda_min(A_k)/mu.
        report.xi = cfg.xi.value_or(
            std::min(1.0, 0.25 * problem.min_curvature() / report.mu));
        if (!report.rho_positive) {
            report.all_satisfied = false;
            return report;
        }
        run = run_rounds(problem, w0, report.mu, report.xi, report.rho, cfg.rounds);
        const auto traj_b = estimate_B(problem, run.iterates);
        if (traj_b && *traj_b > b_est * (1.0 + 1e-9)) {
            b_est = *traj_b;
            continue;
        }
        break;
    }
    report.rounds = std::move(run.rounds);
    report.all_satisfied = !report.rounds.empty() &&
                           std::all_of(report.rounds.begin(), report.rounds.end(),
                                       [](const DescentRound& r) { return r.satisfied; });
    return report;
}

double xi_expectation_closed_form(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw ConfigError("xi_expectation_closed_form: p must be in (0,1)");
    return p * std::log(p) / (p - 1.0);
}

XiExpectationResult xi_expectation_check(double p, std::int64_t trials, std::uint64_t seed) {
    if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("xi_expectation_check: p must be in (0,1)");
    constexpr int kBurnIn = 100;
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::participation)}));
    XiExpectationResult result;
    result.closed_form = xi_expectation_closed_form(p);
    double sum = 0.0;
    std::size_t count = 0;
    std::int64_t last_participation = -1;
    for (std::int64_t round = 1; round <= trials; ++round) {
        if (!rng.bernoulli(p)) continue;
        if (last_participation >= 0 && round > kBurnIn) {
            sum += 1.0 / static_cast<double>(round - last_participation);
            ++count;
        }
        last_participation = round;
    }
    result.samples = count;
    result.empirical = count > 0 ? sum / static_cast<double>(count) : 0.0;
    result.rel_error = std::fabs(result.empirical - result.closed_form) / result.closed_form;
    return result;
}

}  // namespace fedtrip
