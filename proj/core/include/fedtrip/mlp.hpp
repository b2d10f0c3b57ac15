#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedtrip/dataset.hpp"
#include "fedtrip/param_vector.hpp"

namespace fedtrip {

enum class Activation { relu };

// Fully connected network: input -> hidden_dims... -> num_classes, with the
// activation after every hidden layer and raw logits at the output.
struct MlpSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t num_classes = 0;
    Activation activation = Activation::relu;

    // Layer widths including input and output.
    std::vector<std::size_t> widths() const;
    std::size_t param_count() const;
    // Multiply-accumulate count of one forward pass for a single sample.
    std::size_t mac_count_per_sample() const;
    // Segments fc<i>.weight (out x in) and fc<i>.bias (out), in layer order.
    LayoutPtr layout() const;
    void validate() const;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero, drawn
// from the given seed in layer order.
ParamVector init_mlp_params(const MlpSpec& spec, std::uint64_t seed);

// Logits for a batch (rows x input_dim) -> (rows x num_classes).
Matrix forward(const MlpSpec& spec, const ParamVector& params, const Matrix& batch);

struct LossGrad {
    double loss = 0.0;
    ParamVector grad;
};

// Mean cross-entropy over the batch plus its exact analytic gradient.
// Softmax uses max-subtraction before exponentiation.
LossGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& batch,
                       std::span<const int> labels);

// Fraction of rows whose argmax logit equals the label.
double accuracy(const MlpSpec& spec, const ParamVector& params, const Dataset& data,
                std::size_t eval_chunk = 512);

}  // namespace fedtrip
