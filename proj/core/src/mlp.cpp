#include "fedtrip/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedtrip/errors.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

std::vector<std::size_t> MlpSpec::widths() const {
    std::vector<std::size_t> w;
    w.reserve(hidden_dims.size() + 2);
    w.push_back(input_dim);
    w.insert(w.end(), hidden_dims.begin(), hidden_dims.end());
    w.push_back(num_classes);
    return w;
}

std::size_t MlpSpec::param_count() const {
    const auto w = widths();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) n += w[l] * w[l + 1] + w[l + 1];
    return n;
}

std::size_t MlpSpec::mac_count_per_sample() const {
    const auto w = widths();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) n += w[l] * w[l + 1];
    return n;
}

LayoutPtr MlpSpec::layout() const {
    const auto w = widths();
    std::vector<LayoutSegment> segs;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const std::string base = "fc" + std::to_string(l);
        segs.push_back({base + ".weight", {w[l + 1], w[l]}});
        segs.push_back({base + ".bias", {w[l + 1]}});
    }
    return make_layout(std::move(segs));
}

void MlpSpec::validate() const {
    if (input_dim == 0 || num_classes == 0) throw ConfigError("MlpSpec: zero dimension");
    for (std::size_t h : hidden_dims)
        if (h == 0) throw ConfigError("MlpSpec: zero hidden width");
}

ParamVector init_mlp_params(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    ParamVector params = ParamVector::zeros(spec.layout());
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::init)}));
    const auto w = spec.widths();
    std::size_t seg = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w[l]));
        double* weights = params.segment(seg++);
        for (std::size_t i = 0; i < w[l + 1] * w[l]; ++i)
            weights[i] = rng.uniform(-bound, bound);
        ++seg;  // bias segment stays zero
    }
    return params;
}

namespace {

void check_io(const MlpSpec& spec, const ParamVector& params, const Matrix& batch) {
    if (batch.cols != spec.input_dim)
        throw LayoutError("forward: batch column count " + std::to_string(batch.cols) +
                          " does not match input_dim " + std::to_string(spec.input_dim));
    if (!params.layout()) throw LayoutError("forward: params have no layout");
    const auto w = spec.widths();
    const auto& segs = params.layout()->segments();
    bool ok = segs.size() == 2 * (w.size() - 1);
    for (std::size_t l = 0; ok && l + 1 < w.size(); ++l) {
        ok = segs[2 * l].shape == std::vector<std::size_t>{w[l + 1], w[l]} &&
             segs[2 * l + 1].shape == std::vector<std::size_t>{w[l + 1]};
    }
    if (!ok) throw LayoutError("forward: params layout does not match spec");
}

// out(rows x n) = in(rows x m) * weightsT + bias, weights given as (n x m).
void affine(const Matrix& in, const double* weights, const double* bias, Matrix& out) {
    const std::size_t rows = in.rows, m = in.cols, n = out.cols;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* x = in.row(r);
        double* o = out.row(r);
        for (std::size_t j = 0; j < n; ++j) {
            const double* wrow = weights + j * m;
            double s = bias[j];
            for (std::size_t k = 0; k < m; ++k) s += x[k] * wrow[k];
            o[j] = s;
        }
    }
}

// Runs the network, optionally keeping every pre-activation for backprop.
Matrix run_forward(const MlpSpec& spec, const ParamVector& params, const Matrix& batch,
                   std::vector<Matrix>* activations, std::vector<Matrix>* preacts) {
    const auto w = spec.widths();
    const std::size_t layers = w.size() - 1;
    Matrix cur = batch;
    if (activations) activations->push_back(cur);
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z(cur.rows, w[l + 1]);
        affine(cur, params.segment(2 * l), params.segment(2 * l + 1), z);
        if (l + 1 < layers) {
            if (preacts) preacts->push_back(z);
            Matrix a = z;
            for (double& v : a.data) v = v > 0.0 ? v : 0.0;
            if (activations) activations->push_back(a);
            cur = std::move(a);
        } else {
            cur = std::move(z);
        }
    }
    return cur;
}

}  // namespace

Matrix forward(const MlpSpec& spec, const ParamVector& params, const Matrix& batch) {
    check_io(spec, params, batch);
    return run_forward(spec, params, batch, nullptr, nullptr);
}

LossGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& batch,
                       std::span<const int> labels) {
    check_io(spec, params, batch);
    if (batch.rows == 0) throw UsageError("loss_and_grad: empty batch");
    if (labels.size() != batch.rows)
        throw UsageError("loss_and_grad: label count does not match batch rows");

    std::vector<Matrix> activations;  // a_0 .. a_{L-1}
    std::vector<Matrix> preacts;      // z_0 .. z_{L-2}
    Matrix logits = run_forward(spec, params, batch, &activations, &preacts);

    const std::size_t n = batch.rows, c = spec.num_classes;
    // Softmax with max-subtraction; dlogits = (p - onehot) / n.
    Matrix dlogits(n, c);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = logits.row(r);
        double mx = row[0];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) denom += std::exp(row[j] - mx);
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= c)
            throw UsageError("loss_and_grad: label out of range");
        loss += std::log(denom) - (row[static_cast<std::size_t>(y)] - mx);
        double* d = dlogits.row(r);
        for (std::size_t j = 0; j < c; ++j) d[j] = std::exp(row[j] - mx) / denom;
        d[static_cast<std::size_t>(y)] -= 1.0;
    }
    loss /= static_cast<double>(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : dlogits.data) v *= inv_n;

    ParamVector grad = ParamVector::zeros(params.layout());
    const auto w = spec.widths();
    const std::size_t layers = w.size() - 1;
    Matrix dz = std::move(dlogits);
    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& a = activations[l];
        double* dw = grad.segment(2 * l);
        double* db = grad.segment(2 * l + 1);
        const std::size_t out_dim = w[l + 1], in_dim = w[l];
        for (std::size_t r = 0; r < n; ++r) {
            const double* dzr = dz.row(r);
            const double* ar = a.row(r);
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double coef = dzr[o];
                if (coef == 0.0) continue;
                double* dwrow = dw + o * in_dim;
                for (std::size_t i = 0; i < in_dim; ++i) dwrow[i] += coef * ar[i];
                db[o] += coef;
            }
        }
        if (l == 0) break;
        const double* weights = params.segment(2 * l);
        Matrix dprev(n, in_dim);
        for (std::size_t r = 0; r < n; ++r) {
            const double* dzr = dz.row(r);
            double* dp = dprev.row(r);
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double coef = dzr[o];
                if (coef == 0.0) continue;
                const double* wrow = weights + o * in_dim;
                for (std::size_t i = 0; i < in_dim; ++i) dp[i] += coef * wrow[i];
            }
        }
        const Matrix& z = preacts[l - 1];
        for (std::size_t i = 0; i < dprev.data.size(); ++i)
            if (z.data[i] <= 0.0) dprev.data[i] = 0.0;
        dz = std::move(dprev);
    }
    return {loss, std::move(grad)};
}

double accuracy(const MlpSpec& spec, const ParamVector& params, const Dataset& data,
                std::size_t eval_chunk) {
    if (data.size() == 0) throw UsageError("accuracy: empty dataset");
    std::size_t correct = 0;
    for (std::size_t start = 0; start < data.size(); start += eval_chunk) {
        const std::size_t stop = std::min(start + eval_chunk, data.size());
        Matrix chunk(stop - start, data.dim());
        for (std::size_t r = start; r < stop; ++r)
            std::copy_n(data.features.row(r), data.dim(), chunk.row(r - start));
        Matrix logits = forward(spec, params, chunk);
        for (std::size_t r = 0; r < logits.rows; ++r) {
            const double* row = logits.row(r);
            std::size_t best = 0;
            for (std::size_t j = 1; j < logits.cols; ++j)
                if (row[j] > row[best]) best = j;
            if (static_cast<int>(best) == data.labels[start + r]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace fedtrip
