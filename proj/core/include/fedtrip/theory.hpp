#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedtrip/quadratic.hpp"

namespace fedtrip {

// Empirical lower bound on the gradient-dissimilarity constant B:
// max over clients and sample points of |grad F_k(x)| / |grad f(x)|.
// Points where |grad f| <= 1e-9 are skipped; empty when every point is
// (near-)stationary.
std::optional<double> estimate_B(const QuadraticProblem& problem,
                                 const std::vector<ParamVector>& sample_points);

// Exact minimizer of h_k(w) = F_k(w) + (mu/2)[|w-w_g|^2 - xi|w-w_h|^2],
// i.e. the solution of (A_k + mu(1-xi) I) w = A_k c_k + mu w_g - mu xi w_h.
// Throws SingularityError when the regularized Hessian is not PD.
ParamVector exact_local_solve(const QuadraticProblem& problem, int client,
                              const ParamVector& w_global, const ParamVector& w_hist,
                              double mu, double xi);

struct DescentRound {
    int round = 0;
    double f_before = 0.0;
    double f_after = 0.0;
    double grad_norm_sq = 0.0;
    double bound = 0.0;   // f_before - rho * grad_norm_sq
    double margin = 0.0;  // bound - f_after (>= 0 when satisfied)
    bool satisfied = false;
    double max_gamma = 0.0;  // largest measured inexactness across clients
};

struct DescentReport {
    double L = 0.0;
    double B = 0.0;
    double mu = 0.0;
    double xi = 0.0;
    double rho = 0.0;
    bool rho_positive = false;
    bool all_satisfied = false;
    std::vector<DescentRound> rounds;
};

struct DescentConfig {
    int rounds = 50;
    double mu_factor = 6.0;  // mu = mu_factor * L * B^2
    // Explicit xi; when unset the check picks the largest xi that keeps
    // every regularized local objective mu-strongly convex
    // (0.25 * min_k lambda_min(A_k) / mu, capped at 1).
    std::optional<double> xi;
    std::uint64_t seed = 0;
    int ball_samples = 100;
};

// Empirical check of the per-round descent inequality
// f(w^{t+1}) <= f(w^t) - rho |grad f(w^t)|^2 with gamma = 0 local solves and
// full participation. B is estimated from random ball points around the
// minimizer plus the iterate trajectory; when the trajectory raises the
// estimate, mu is recomputed and the run repeats so the reported rounds are
// consistent with the final (B, mu, rho).
DescentReport descent_check(const QuadraticProblem& problem, const DescentConfig& cfg);

// Closed-form stationary mean of the staleness coefficient under Bernoulli
// participation: p ln p / (p - 1).
double xi_expectation_closed_form(double p);

struct XiExpectationResult {
    double empirical = 0.0;
    double closed_form = 0.0;
    double rel_error = 0.0;
    std::size_t samples = 0;
};

// Simulates `trials` rounds of Bernoulli(p) participation and averages
// 1/gap over participations after a 100-round burn-in.
XiExpectationResult xi_expectation_check(double p, std::int64_t trials, std::uint64_t seed = 0);

}  // namespace fedtrip
