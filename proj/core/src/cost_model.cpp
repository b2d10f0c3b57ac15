#include "fedtrip/cost_model.hpp"

#include "fedtrip/errors.hpp"

namespace fedtrip {

CostMethod cost_method_from_string(const std::string& name) {
    if (name == "fedavg") return CostMethod::fedavg;
    if (name == "fedprox") return CostMethod::fedprox;
    if (name == "fedtrip") return CostMethod::fedtrip;
    if (name == "feddyn") return CostMethod::feddyn;
    if (name == "moon") return CostMethod::moon;
    if (name == "scaffold") return CostMethod::scaffold;
    if (name == "mimelite") return CostMethod::mimelite;
    throw ConfigError("unknown cost method '" + name + "'");
}

std::string cost_method_to_string(CostMethod method) {
    switch (method) {
        case CostMethod::fedavg: return "fedavg";
        case CostMethod::fedprox: return "fedprox";
        case CostMethod::fedtrip: return "fedtrip";
        case CostMethod::feddyn: return "feddyn";
        case CostMethod::moon: return "moon";
        case CostMethod::scaffold: return "scaffold";
        case CostMethod::mimelite: return "mimelite";
    }
    throw ConfigError("unknown cost method tag");
}

ModelCostProfile ModelCostProfile::mlp() {
    return {"mlp", 0.8e6, 0.08e6, 2 * 0.08e6, 0.3e6};
}

ModelCostProfile ModelCostProfile::cnn() {
    return {"cnn", 0.62e6, 0.42e6, 2 * 0.42e6, 0.24e6};
}

ModelCostProfile ModelCostProfile::alexnet() {
    return {"alexnet", 2.72e6, 145.93e6, 2 * 145.93e6, 10.42e6};
}

ModelCostProfile ModelCostProfile::custom_mlp(const MlpSpec& spec) {
    const double params = static_cast<double>(spec.param_count());
    const double fp = 2.0 * static_cast<double>(spec.mac_count_per_sample());
    return {"custom", params, fp, 2.0 * fp, params * 8.0};
}

double attach_flops(CostMethod method, double k_iters, double batch, double n_local,
                    const ModelCostProfile& profile, int p_hist) {
    if (k_iters <= 0 || batch <= 0 || n_local <= 0)
        throw ConfigError("attach_flops: counts must be positive");
    const double w = profile.param_count;
    switch (method) {
        case CostMethod::fedavg: return 0.0;
        case CostMethod::fedprox: return 2.0 * k_iters * w;
        case CostMethod::fedtrip: return 4.0 * k_iters * w;
        case CostMethod::feddyn: return 4.0 * k_iters * w;
        case CostMethod::moon:
            return k_iters * batch * (1.0 + static_cast<double>(p_hist)) * profile.fp_per_sample;
        case CostMethod::scaffold:
            return 2.0 * (k_iters + 1.0) * w + n_local * (profile.fp_per_sample + profile.bp_per_sample);
        case CostMethod::mimelite:
            return n_local * (profile.fp_per_sample + profile.bp_per_sample);
    }
    throw ConfigError("attach_flops: unknown method");
}

double extra_comm_params(CostMethod method, double param_count) {
    switch (method) {
        case CostMethod::scaffold:
        case CostMethod::mimelite:
            return 2.0 * param_count;
        default:
            return 0.0;
    }
}

double round_comm_bytes(CostMethod method, int k_selected, const ModelCostProfile& profile) {
    if (k_selected < 1) throw ConfigError("round_comm_bytes: k_selected must be >= 1");
    const double base = 2.0 * static_cast<double>(k_selected) * profile.comm_bytes_per_transfer;
    const double bytes_per_param =
        profile.param_count > 0.0 ? profile.comm_bytes_per_transfer / profile.param_count : 0.0;
    const double extra = static_cast<double>(k_selected) *
                         extra_comm_params(method, profile.param_count) * bytes_per_param;
    return base + extra;
}

int local_iterations(int local_epochs, int batch, int n_local) {
    if (batch <= 0) throw ConfigError("local_iterations: batch must be positive");
    const int n_batches = (n_local + batch - 1) / batch;
    return local_epochs * n_batches;
}

double training_flops(CostMethod method, int rounds, int k_selected, int local_epochs,
                      int batch, int n_local, const ModelCostProfile& profile, int p_hist) {
    if (rounds < 0) throw ConfigError("training_flops: rounds must be nonnegative");
    if (rounds == 0 || local_epochs == 0) return 0.0;
    const int iters = local_iterations(local_epochs, batch, n_local);
    const double feedforward = static_cast<double>(iters) * batch * profile.fp_per_sample;
    const double attach = attach_flops(method, iters, batch, n_local, profile, p_hist);
    return static_cast<double>(rounds) * static_cast<double>(k_selected) * (feedforward + attach);
}

}  // namespace fedtrip
