#include "fedtrip/federation.hpp"

#include <cmath>
#include <string>

#include "fedtrip/cost_model.hpp"
#include "fedtrip/errors.hpp"
#include "fedtrip/optimizer.hpp"

namespace fedtrip {

void FederationConfig::validate() const {
    if (n_clients < 1) throw ConfigError("config: n_clients must be >= 1");
    if (clients_per_round < 1 || clients_per_round > n_clients)
        throw ConfigError("config: need 1 <= clients_per_round <= n_clients");
    if (rounds < 0) throw ConfigError("config: rounds must be >= 0");
    if (local_epochs < 0) throw ConfigError("config: local_epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("config: lr must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("config: momentum must be in [0,1)");
    if (mu < 0.0) throw ConfigError("config: mu must be >= 0");
    if (xi_mode == XiMode::constant && !(xi_constant > 0.0 && xi_constant <= 1.0))
        throw ConfigError("config: constant xi must be in (0,1]");
}

std::vector<int> select_clients(int n, int k, Rng& stream) {
    if (k > n) throw ConfigError("select_clients: k=" + std::to_string(k) + " exceeds n=" +
                                 std::to_string(n));
    if (k < 0 || n < 0) throw ConfigError("select_clients: negative count");
    return stream.sample_without_replacement(n, k);
}

double xi_value(int current_round, int last_round, XiMode mode, double constant) {
    const int gap = current_round - last_round;
    if (gap <= 0) throw LogicError("xi_value: participation gap must be positive");
    return mode == XiMode::reciprocal_gap ? 1.0 / static_cast<double>(gap) : constant;
}

LocalTrainResult local_train(const ClientState& client, const ParamVector& w_global,
                             const FederationConfig& cfg, int round,
                             const BatchObjective& objective) {
    if (client.shard.empty()) throw ConfigError("local_train: client shard is empty");

    ParamVector w = w_global;
    SgdmState opt = SgdmState::fresh(w_global.layout(), cfg.lr, cfg.momentum);

    RegularizerParams reg;
    reg.mu = cfg.mu;
    const ParamVector* hist = nullptr;
    if (cfg.method == MethodTag::fedtrip && client.hist_model.has_value()) {
        reg.xi = xi_value(round, client.last_round.value(), cfg.xi_mode, cfg.xi_constant);
        hist = &client.hist_model.value();
    }

    Rng shuffle_stream(derive_seed({cfg.seed, static_cast<std::uint64_t>(StreamTag::batch_shuffle),
                                    static_cast<std::uint64_t>(client.id),
                                    static_cast<std::uint64_t>(round)}));
    std::vector<std::size_t> order = client.shard;
    double loss_sum = 0.0;
    int steps = 0;
    for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        shuffle_stream.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::span<const std::size_t> batch(order.data() + start, stop - start);
            LossGrad lg = objective(w, batch);
            ParamVector direction =
                modified_direction(cfg.method, lg.grad, w, w_global, hist, reg);
            sgdm_step(w, direction, opt);
            loss_sum += lg.loss;
            ++steps;
        }
    }
    return {std::move(w), steps > 0 ? loss_sum / steps : 0.0, steps};
}

ParamVector aggregate(const std::vector<ParamVector>& models, const std::vector<double>& weights) {
    if (models.empty()) throw ConfigError("aggregate: no models");
    if (models.size() != weights.size())
        throw ConfigError("aggregate: model/weight count mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("aggregate: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw ConfigError("aggregate: weights sum to " + std::to_string(sum) + ", not 1");
    ParamVector out = scale(models[0], weights[0]);
    for (std::size_t i = 1; i < models.size(); ++i) {
        require_same_layout(out, models[i], "aggregate");
        axpy(out, weights[i], models[i]);
    }
    return out;
}

FederationEngine::FederationEngine(FederationConfig cfg, MlpSpec model,
                                   const PartitionResult& partition, const Dataset& train,
                                   const Dataset& test)
    : cfg_(std::move(cfg)), model_(std::move(model)), train_(train), test_(test) {
    cfg_.validate();
    model_.validate();
    if (partition.num_clients() != cfg_.n_clients)
        throw ConfigError("federation: partition has " +
                          std::to_string(partition.num_clients()) + " shards for " +
                          std::to_string(cfg_.n_clients) + " clients");
    clients_.reserve(static_cast<std::size_t>(cfg_.n_clients));
    for (int k = 0; k < cfg_.n_clients; ++k)
        clients_.push_back(ClientState{k, partition.shards[static_cast<std::size_t>(k)], {}, {}});
    w_global_ = init_mlp_params(model_, cfg_.seed);
}

RoundRecord FederationEngine::step() {
    const int t = ++round_;
    const ModelCostProfile profile = ModelCostProfile::custom_mlp(model_);
    const CostMethod cost_method = cost_method_from_string(method_to_string(cfg_.method));

    BatchObjective objective = [&](const ParamVector& w, std::span<const std::size_t> idx) {
        Matrix batch = train_.gather(idx);
        std::vector<int> labels = train_.gather_labels(idx);
        return loss_and_grad(model_, w, batch, labels);
    };

    Rng select_stream(derive_seed({cfg_.seed, static_cast<std::uint64_t>(StreamTag::select),
                                   static_cast<std::uint64_t>(t)}));
    const std::vector<int> selected =
        select_clients(cfg_.n_clients, cfg_.clients_per_round, select_stream);

    std::vector<ParamVector> local_models;
    std::vector<double> weights;
    local_models.reserve(selected.size());
    weights.reserve(selected.size());
    double loss_sum = 0.0;
    double shard_total = 0.0;
    for (int id : selected)
        shard_total += static_cast<double>(clients_[static_cast<std::size_t>(id)].shard.size());

    for (int id : selected) {
        const ClientState& client = clients_[static_cast<std::size_t>(id)];
        LocalTrainResult result = local_train(client, w_global_, cfg_, t, objective);
        loss_sum += result.mean_loss;
        local_models.push_back(std::move(result.model));
        weights.push_back(cfg_.aggregation_weights == AggregationWeights::uniform
                              ? 1.0 / static_cast<double>(selected.size())
                              : static_cast<double>(client.shard.size()) / shard_total);

        const int n_local = static_cast<int>(client.shard.size());
        cum_flops_ += training_flops(cost_method, 1, 1, cfg_.local_epochs, cfg_.batch_size,
                                     n_local, profile);
    }
    cum_comm_ += round_comm_bytes(cost_method, static_cast<int>(selected.size()), profile);

    w_global_ = aggregate(local_models, weights);

    for (std::size_t i = 0; i < selected.size(); ++i) {
        ClientState& client = clients_[static_cast<std::size_t>(selected[i])];
        client.hist_model = std::move(local_models[i]);
        client.last_round = t;
    }

    RoundRecord rec;
    rec.round = t;
    rec.test_accuracy = accuracy(model_, w_global_, test_);
    rec.mean_train_loss = loss_sum / static_cast<double>(selected.size());
    rec.selected = selected;
    rec.cum_flops = cum_flops_;
    rec.cum_comm_bytes = cum_comm_;
    return rec;
}

std::vector<RoundRecord> run_federation(const FederationConfig& cfg, const MlpSpec& model,
                                        const PartitionResult& partition, const Dataset& train,
                                        const Dataset& test, ParamVector* final_model) {
    FederationEngine engine(cfg, model, partition, train, test);
    std::vector<RoundRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int t = 1; t <= cfg.rounds; ++t) records.push_back(engine.step());
    if (final_model) *final_model = engine.global_model();
    return records;
}

}  // namespace fedtrip
