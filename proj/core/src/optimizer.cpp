#include "fedtrip/optimizer.hpp"

#include "fedtrip/errors.hpp"

namespace fedtrip {

SgdmState SgdmState::fresh(LayoutPtr layout, double learning_rate, double momentum) {
    if (!(learning_rate > 0.0)) throw ConfigError("SgdmState: learning rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("SgdmState: momentum must be in [0,1)");
    return SgdmState{ParamVector::zeros(std::move(layout)), learning_rate, momentum};
}

void sgdm_step(ParamVector& params, const ParamVector& grad, SgdmState& state) {
    require_same_layout(params, grad, "sgdm_step");
    require_same_layout(params, state.velocity, "sgdm_step");
    const double beta = state.momentum, lr = state.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.velocity[i] = beta * state.velocity[i] + grad[i];
        params[i] -= lr * state.velocity[i];
    }
}

}  // namespace fedtrip
