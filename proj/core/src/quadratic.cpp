#include "fedtrip/quadratic.hpp"

#include <cmath>

#include "fedtrip/errors.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::shifted(double factor) const {
    SymMatrix m = *this;
    for (std::size_t i = 0; i < dim_; ++i) m.at(i, i) += factor;
    return m;
}

std::vector<double> SymMatrix::matvec(const std::vector<double>& x) const {
    std::vector<double> y(dim_, 0.0);
    for (std::size_t r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) s += at(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

std::optional<SymMatrix> SymMatrix::cholesky() const {
    SymMatrix lower(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        double diag = at(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= lower.at(j, k) * lower.at(j, k);
        if (!(diag > 0.0)) return std::nullopt;
        const double ljj = std::sqrt(diag);
        lower.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < dim_; ++i) {
            double s = at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
            lower.at(i, j) = s / ljj;
        }
    }
    return lower;
}

std::vector<double> SymMatrix::solve_with_cholesky(const SymMatrix& lower,
                                                   const std::vector<double>& b) const {
    auto substitute = [&](const std::vector<double>& rhs) {
        std::vector<double> y(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            double s = rhs[i];
            for (std::size_t k = 0; k < i; ++k) s -= lower.at(i, k) * y[k];
            y[i] = s / lower.at(i, i);
        }
        std::vector<double> x(dim_);
        for (std::size_t ii = dim_; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < dim_; ++k) s -= lower.at(k, ii) * x[k];
            x[ii] = s / lower.at(ii, ii);
        }
        return x;
    };
    std::vector<double> x = substitute(b);
    // One refinement pass keeps residuals near machine precision even for
    // moderately conditioned systems.
    std::vector<double> r = matvec(x);
    for (std::size_t i = 0; i < dim_; ++i) r[i] = b[i] - r[i];
    std::vector<double> dx = substitute(r);
    for (std::size_t i = 0; i < dim_; ++i) x[i] += dx[i];
    return x;
}

std::vector<double> SymMatrix::solve_spd(const std::vector<double>& b) const {
    auto lower = cholesky();
    if (!lower) throw SingularityError("solve_spd: matrix is not positive definite");
    return solve_with_cholesky(*lower, b);
}

double SymMatrix::lambda_max(std::uint64_t seed) const {
    if (dim_ == 0) return 0.0;
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::theory), 0xeadbeefULL}));
    std::vector<double> v(dim_);
    for (double& x : v) x = rng.uniform(0.5, 1.5);
    double lambda = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<double> w = matvec(v);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (double& x : w) x /= norm;
        double next = 0.0;
        std::vector<double> aw = matvec(w);
        for (std::size_t i = 0; i < dim_; ++i) next += w[i] * aw[i];
        v = std::move(w);
        if (iter > 2 && std::fabs(next - lambda) <= 1e-13 * std::max(1.0, std::fabs(next))) {
            return next;
        }
        lambda = next;
    }
    return lambda;
}

double SymMatrix::lambda_min(std::uint64_t seed) const {
    const double lmax = lambda_max(seed);
    // lambda_min(A) = lmax - lambda_max(lmax*I - A)
    SymMatrix flipped(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            flipped.at(r, c) = (r == c ? lmax : 0.0) - at(r, c);
    return lmax - flipped.lambda_max(seed + 1);
}

QuadraticProblem::QuadraticProblem(std::vector<SymMatrix> hessians,
                                   std::vector<std::vector<double>> centers)
    : hessians_(std::move(hessians)), centers_(std::move(centers)) {
    if (hessians_.empty() || hessians_.size() != centers_.size())
        throw ConfigError("QuadraticProblem: need one hessian and one center per client");
    dim_ = hessians_.front().dim();
    for (std::size_t k = 0; k < hessians_.size(); ++k) {
        if (hessians_[k].dim() != dim_ || centers_[k].size() != dim_)
            throw ConfigError("QuadraticProblem: inconsistent dimensions");
        if (!hessians_[k].is_positive_definite())
            throw ConfigError("QuadraticProblem: client hessian is not positive definite");
    }
    layout_ = make_flat_layout(dim_);
}

QuadraticProblem QuadraticProblem::random(int num_clients, std::size_t dim, std::uint64_t seed) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::theory), 1}));
    std::vector<SymMatrix> hessians;
    std::vector<std::vector<double>> centers;
    for (int k = 0; k < num_clients; ++k) {
        std::vector<double> g(dim * dim);
        for (double& x : g) x = rng.uniform(-1.0, 1.0);
        SymMatrix a(dim);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < dim; ++i) s += g[i * dim + r] * g[i * dim + c];
                a.at(r, c) = s + (r == c ? 0.25 : 0.0);
            }
        hessians.push_back(std::move(a));
        std::vector<double> c(dim);
        for (double& x : c) x = rng.uniform(-2.0, 2.0);
        centers.push_back(std::move(c));
    }
    return QuadraticProblem(std::move(hessians), std::move(centers));
}

double QuadraticProblem::client_value(int k, const ParamVector& w) const {
    const auto& a = hessians_[static_cast<std::size_t>(k)];
    const auto& c = centers_[static_cast<std::size_t>(k)];
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = w[i] - c[i];
    const std::vector<double> ad = a.matvec(d);
    double v = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) v += d[i] * ad[i];
    return 0.5 * v;
}

ParamVector QuadraticProblem::client_grad(int k, const ParamVector& w) const {
    const auto& a = hessians_[static_cast<std::size_t>(k)];
    const auto& c = centers_[static_cast<std::size_t>(k)];
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = w[i] - c[i];
    return ParamVector(layout_, a.matvec(d));
}

double QuadraticProblem::global_value(const ParamVector& w) const {
    double v = 0.0;
    for (int k = 0; k < num_clients(); ++k) v += client_value(k, w);
    return v / num_clients();
}

ParamVector QuadraticProblem::global_grad(const ParamVector& w) const {
    ParamVector g = ParamVector::zeros(layout_);
    for (int k = 0; k < num_clients(); ++k) axpy(g, 1.0, client_grad(k, w));
    return scale(g, 1.0 / num_clients());
}

ParamVector QuadraticProblem::global_minimizer() const {
    SymMatrix total(dim_);
    std::vector<double> rhs(dim_, 0.0);
    for (std::size_t k = 0; k < hessians_.size(); ++k) {
        const auto ac = hessians_[k].matvec(centers_[k]);
        for (std::size_t r = 0; r < dim_; ++r) {
            rhs[r] += ac[r];
            for (std::size_t c = 0; c < dim_; ++c) total.at(r, c) += hessians_[k].at(r, c);
        }
    }
    return ParamVector(layout_, total.solve_spd(rhs));
}

double QuadraticProblem::smoothness_L() const {
    double l = 0.0;
    for (const auto& a : hessians_) l = std::max(l, a.lambda_max());
    return l;
}

double QuadraticProblem::min_curvature() const {
    double l = hessians_.front().lambda_min();
    for (const auto& a : hessians_) l = std::min(l, a.lambda_min());
    return l;
}

ParamVector QuadraticProblem::point(std::vector<double> values) const {
    return ParamVector(layout_, std::move(values));
}

}  // namespace fedtrip
