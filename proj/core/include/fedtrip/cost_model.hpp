#pragma once

#include <string>

#include "fedtrip/mlp.hpp"

namespace fedtrip {

// Methods tracked by the cost accounting. Wider than the trainable set:
// the extra rows exist for cost comparison only.
enum class CostMethod { fedavg, fedprox, fedtrip, feddyn, moon, scaffold, mimelite };

CostMethod cost_method_from_string(const std::string& name);
std::string cost_method_to_string(CostMethod method);

// Per-model communication/computation constants. Presets carry the
// published MLP / CNN / AlexNet statistics; custom profiles derive from a
// live MlpSpec.
struct ModelCostProfile {
    std::string name;
    double param_count = 0.0;              // |w|
    double fp_per_sample = 0.0;            // FLOPs of one feedforward, one sample
    double bp_per_sample = 0.0;            // FLOPs of one backprop, one sample
    double comm_bytes_per_transfer = 0.0;  // bytes of one full-model transfer

    static ModelCostProfile mlp();
    static ModelCostProfile cnn();
    static ModelCostProfile alexnet();
    // fp = 2 * multiply-accumulate count, bp = 2 * fp, one transfer =
    // 8 bytes per parameter.
    static ModelCostProfile custom_mlp(const MlpSpec& spec);
};

// FLOPs of a method's attaching operations for one client in one round.
// k_iters = local iterations, batch = mini-batch size, n_local = client
// sample count, p_hist = number of history models (MOON only).
double attach_flops(CostMethod method, double k_iters, double batch, double n_local,
                    const ModelCostProfile& profile, int p_hist = 1);

// Extra parameters transferred per client beyond the baseline down+up model
// exchange (0 for most methods, 2|w| for SCAFFOLD/MimeLite).
double extra_comm_params(CostMethod method, double param_count);

// Total bytes of one round's transfers: down + up per selected client plus
// the method's extra parameter traffic at the profile's bytes-per-parameter
// rate.
double round_comm_bytes(CostMethod method, int k_selected, const ModelCostProfile& profile);

// Feedforward + attaching FLOPs across a whole run; backprop is excluded
// from the measurement scope by convention.
double training_flops(CostMethod method, int rounds, int k_selected, int local_epochs,
                      int batch, int n_local, const ModelCostProfile& profile, int p_hist = 1);

// Local iterations of one round: epochs * ceil(n / batch).
int local_iterations(int local_epochs, int batch, int n_local);

}  // namespace fedtrip
