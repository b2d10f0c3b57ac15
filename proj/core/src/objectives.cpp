#include "fedtrip/objectives.hpp"

#include <limits>

#include "fedtrip/errors.hpp"

namespace fedtrip {

MethodTag method_from_string(const std::string& name) {
    if (name == "fedavg") return MethodTag::fedavg;
    if (name == "fedprox") return MethodTag::fedprox;
    if (name == "fedtrip") return MethodTag::fedtrip;
    throw ConfigError("unknown method '" + name + "'");
}

std::string method_to_string(MethodTag method) {
    switch (method) {
        case MethodTag::fedavg: return "fedavg";
        case MethodTag::fedprox: return "fedprox";
        case MethodTag::fedtrip: return "fedtrip";
    }
    throw ConfigError("unknown method tag");
}

double triplet_penalty(const ParamVector& w_local, const ParamVector& w_global,
                       const ParamVector& w_hist, const RegularizerParams& p) {
    require_same_layout(w_local, w_global, "triplet_penalty");
    require_same_layout(w_local, w_hist, "triplet_penalty");
    double pull = 0.0, push = 0.0;
    for (std::size_t i = 0; i < w_local.size(); ++i) {
        const double dg = w_local[i] - w_global[i];
        const double dh = w_local[i] - w_hist[i];
        pull += dg * dg;
        push += dh * dh;
    }
    return 0.5 * p.mu * (pull - p.xi * push);
}

ParamVector triplet_grad(const ParamVector& w_local, const ParamVector& w_global,
                         const ParamVector& w_hist, const RegularizerParams& p) {
    require_same_layout(w_local, w_global, "triplet_grad");
    require_same_layout(w_local, w_hist, "triplet_grad");
    ParamVector out = ParamVector::zeros(w_local.layout());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = p.mu * ((w_local[i] - w_global[i]) + p.xi * (w_hist[i] - w_local[i]));
    return out;
}

ParamVector prox_grad(const ParamVector& w_local, const ParamVector& w_global, double mu) {
    require_same_layout(w_local, w_global, "prox_grad");
    ParamVector out = ParamVector::zeros(w_local.layout());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu * (w_local[i] - w_global[i]);
    return out;
}

ParamVector modified_direction(MethodTag method, const ParamVector& base_grad,
                               const ParamVector& w_local, const ParamVector& w_global,
                               const ParamVector* w_hist, const RegularizerParams& p) {
    // mu = 0 degenerates every method to the plain gradient; return it
    // untouched so the equivalence is bitwise.
    if (method == MethodTag::fedavg || p.mu == 0.0) return base_grad;
    require_same_layout(base_grad, w_local, "modified_direction");
    if (method == MethodTag::fedtrip && w_hist != nullptr)
        return add(base_grad, triplet_grad(w_local, w_global, *w_hist, p));
    return add(base_grad, prox_grad(w_local, w_global, p.mu));
}

std::optional<double> gamma_inexactness(const ParamVector& w_new, const ParamVector& w_global,
                                        const ParamVector& w_hist, const RegularizerParams& p,
                                        const ParamVector& grad_at_new,
                                        const ParamVector& grad_at_global) {
    const double denom = l2_norm(grad_at_global);
    if (denom <= std::numeric_limits<double>::min()) return std::nullopt;
    ParamVector grad_h = add(grad_at_new, triplet_grad(w_new, w_global, w_hist, p));
    return l2_norm(grad_h) / denom;
}

}  // namespace fedtrip
