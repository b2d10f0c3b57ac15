#pragma once

#include "fedtrip/param_vector.hpp"

namespace fedtrip {

// Heavy-ball momentum state: v <- momentum*v + g, w <- w - lr*v.
struct SgdmState {
    ParamVector velocity;
    double learning_rate = 0.01;
    double momentum = 0.9;

    static SgdmState fresh(LayoutPtr layout, double learning_rate, double momentum);
};

// One optimizer step in place. Throws LayoutError on mismatched layouts.
void sgdm_step(ParamVector& params, const ParamVector& grad, SgdmState& state);

}  // namespace fedtrip
