#pragma once

#include <optional>
#include <string>

#include "fedtrip/param_vector.hpp"

namespace fedtrip {

enum class MethodTag { fedavg, fedprox, fedtrip };

MethodTag method_from_string(const std::string& name);
std::string method_to_string(MethodTag method);

// mu weighs the whole regularizer; xi weighs the historical (push-away)
// half and is only meaningful when a historical model exists.
struct RegularizerParams {
    double mu = 0.0;
    double xi = 1.0;
};

// (mu/2) * (|w_l - w_g|^2 - xi * |w_l - w_h|^2). Signed: the historical
// term subtracts, so the value may be negative.
double triplet_penalty(const ParamVector& w_local, const ParamVector& w_global,
                       const ParamVector& w_hist, const RegularizerParams& p);

// Gradient of triplet_penalty w.r.t. w_local:
// mu * ((w_l - w_g) + xi * (w_h - w_l)).
ParamVector triplet_grad(const ParamVector& w_local, const ParamVector& w_global,
                         const ParamVector& w_hist, const RegularizerParams& p);

// Gradient of the proximal penalty (mu/2)|w_l - w_g|^2: mu * (w_l - w_g).
ParamVector prox_grad(const ParamVector& w_local, const ParamVector& w_global, double mu);

// Turns the base data gradient into the method-specific update direction.
// fedavg passes the gradient through; fedprox adds the proximal term;
// fedtrip adds the triplet term, falling back to the proximal term when the
// client has no history yet. Inputs are never mutated.
ParamVector modified_direction(MethodTag method, const ParamVector& base_grad,
                               const ParamVector& w_local, const ParamVector& w_global,
                               const ParamVector* w_hist, const RegularizerParams& p);

// Achieved inexactness |grad h(w_new)| / |grad F(w_global)| from the
// regularized-objective definition. Empty when the denominator vanishes
// (already at a stationary point of F).
std::optional<double> gamma_inexactness(const ParamVector& w_new, const ParamVector& w_global,
                                        const ParamVector& w_hist, const RegularizerParams& p,
                                        const ParamVector& grad_at_new,
                                        const ParamVector& grad_at_global);

}  // namespace fedtrip
