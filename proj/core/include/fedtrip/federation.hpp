#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fedtrip/dataset.hpp"
#include "fedtrip/mlp.hpp"
#include "fedtrip/objectives.hpp"
#include "fedtrip/param_vector.hpp"
#include "fedtrip/partition.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

enum class XiMode { reciprocal_gap, constant };
enum class AggregationWeights { data_size, uniform };

struct FederationConfig {
    int n_clients = 10;
    int clients_per_round = 4;
    int rounds = 100;
    int local_epochs = 1;
    int batch_size = 50;
    double lr = 0.01;
    double momentum = 0.9;
    MethodTag method = MethodTag::fedavg;
    double mu = 0.0;
    XiMode xi_mode = XiMode::reciprocal_gap;
    double xi_constant = 1.0;
    AggregationWeights aggregation_weights = AggregationWeights::data_size;
    std::uint64_t seed = 0;

    void validate() const;
};

// What the engine remembers about one client between rounds: its data shard
// and, once it has participated, the local model it produced last plus the
// round it produced it in.
struct ClientState {
    int id = 0;
    std::vector<std::size_t> shard;
    std::optional<ParamVector> hist_model;
    std::optional<int> last_round;
};

struct RoundRecord {
    int round = 0;
    double test_accuracy = 0.0;
    double mean_train_loss = 0.0;
    std::vector<int> selected;
    double cum_flops = 0.0;
    double cum_comm_bytes = 0.0;
};

// Uniform k-subset of [0, n), ascending. Deterministic given the stream.
std::vector<int> select_clients(int n, int k, Rng& stream);

// Staleness coefficient for a client participating at current_round whose
// last participation was last_round. reciprocal_gap: 1/(gap) in (0,1].
double xi_value(int current_round, int last_round, XiMode mode, double constant = 1.0);

// Base data term of one client: (loss, grad) of the sample subset.
using BatchObjective =
    std::function<LossGrad(const ParamVector& params, std::span<const std::size_t> indices)>;

struct LocalTrainResult {
    ParamVector model;
    double mean_loss = 0.0;
    int steps = 0;
};

// One client's local pass: start from the global model, run local_epochs of
// seeded shuffled mini-batches, each step applying the method's modified
// direction through a fresh-momentum optimizer. Pure: the client state is
// not mutated.
LocalTrainResult local_train(const ClientState& client, const ParamVector& w_global,
                             const FederationConfig& cfg, int round,
                             const BatchObjective& objective);

// Weighted sum of models; weights must be nonnegative and sum to 1 within
// 1e-12. Callers pass models in ascending client id so the reduction order
// is fixed.
ParamVector aggregate(const std::vector<ParamVector>& models, const std::vector<double>& weights);

// Synchronous round loop on an MLP task: select, broadcast, train,
// aggregate, refresh history, evaluate, account costs. step() advances one
// round and returns its record.
class FederationEngine {
public:
    FederationEngine(FederationConfig cfg, MlpSpec model, const PartitionResult& partition,
                     const Dataset& train, const Dataset& test);

    RoundRecord step();
    int round() const { return round_; }
    const ParamVector& global_model() const { return w_global_; }
    const std::vector<ClientState>& clients() const { return clients_; }

private:
    FederationConfig cfg_;
    MlpSpec model_;
    const Dataset& train_;
    const Dataset& test_;
    std::vector<ClientState> clients_;
    ParamVector w_global_;
    int round_ = 0;
    double cum_flops_ = 0.0;
    double cum_comm_ = 0.0;
};

// Runs the engine for cfg.rounds rounds.
std::vector<RoundRecord> run_federation(const FederationConfig& cfg, const MlpSpec& model,
                                        const PartitionResult& partition, const Dataset& train,
                                        const Dataset& test,
                                        ParamVector* final_model = nullptr);

}  // namespace fedtrip
