#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedtrip/param_vector.hpp"

namespace fedtrip {

// Small dense symmetric matrix with just enough linear algebra for the
// convex-quadratic testbed (d stays <= 5 in practice).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

    std::size_t dim() const { return dim_; }
    double& at(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }

    static SymMatrix identity(std::size_t dim);
    // this + factor * I
    SymMatrix shifted(double factor) const;

    std::vector<double> matvec(const std::vector<double>& x) const;

    // Lower Cholesky factor; empty when the matrix is not positive definite.
    std::optional<SymMatrix> cholesky() const;
    // Solves this * x = b via an externally computed Cholesky factor, with
    // one step of iterative refinement.
    std::vector<double> solve_with_cholesky(const SymMatrix& lower,
                                            const std::vector<double>& b) const;
    // Solves this * x = b; throws SingularityError when not PD.
    std::vector<double> solve_spd(const std::vector<double>& b) const;

    bool is_positive_definite() const { return cholesky().has_value(); }

    // Largest eigenvalue by power iteration (matrix must be symmetric PSD).
    double lambda_max(std::uint64_t seed = 0) const;
    // Smallest eigenvalue via power iteration on (lambda_max * I - A).
    double lambda_min(std::uint64_t seed = 0) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> a_;
};

// Federated family of convex quadratics F_k(w) = 0.5 (w-c_k)' A_k (w-c_k)
// with f = mean of F_k. Everything the convergence conditions need (L, the
// global minimizer, exact gradients) is computable in closed form.
class QuadraticProblem {
public:
    QuadraticProblem(std::vector<SymMatrix> hessians, std::vector<std::vector<double>> centers);

    // Random SPD family: A_k = G'G + 0.25 I with G entries uniform in
    // [-1,1], centers uniform in [-2,2].
    static QuadraticProblem random(int num_clients, std::size_t dim, std::uint64_t seed);

    int num_clients() const { return static_cast<int>(hessians_.size()); }
    std::size_t dim() const { return dim_; }
    const SymMatrix& hessian(int k) const { return hessians_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& center(int k) const { return centers_[static_cast<std::size_t>(k)]; }
    const LayoutPtr& layout() const { return layout_; }

    double client_value(int k, const ParamVector& w) const;
    ParamVector client_grad(int k, const ParamVector& w) const;
    double global_value(const ParamVector& w) const;
    ParamVector global_grad(const ParamVector& w) const;

    // (sum A_k)^-1 sum A_k c_k
    ParamVector global_minimizer() const;
    // max_k lambda_max(A_k)
    double smoothness_L() const;
    // min_k lambda_min(A_k)
    double min_curvature() const;

    ParamVector point(std::vector<double> values) const;

private:
    std::vector<SymMatrix> hessians_;
    std::vector<std::vector<double>> centers_;
    std::size_t dim_ = 0;
    LayoutPtr layout_;
};

}  // namespace fedtrip
