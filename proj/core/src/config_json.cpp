#include "fedtrip/config_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedtrip/errors.hpp"

namespace fedtrip {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

FederationConfig parse_base(const json& j) {
    check_keys(j, "base",
               {"n_clients", "clients_per_round", "rounds", "local_epochs", "batch_size", "lr",
                "momentum", "method", "mu", "xi_mode", "xi_constant", "aggregation_weights",
                "seed"});
    FederationConfig cfg;
    read_if(j, "n_clients", cfg.n_clients);
    read_if(j, "clients_per_round", cfg.clients_per_round);
    read_if(j, "rounds", cfg.rounds);
    read_if(j, "local_epochs", cfg.local_epochs);
    read_if(j, "batch_size", cfg.batch_size);
    read_if(j, "lr", cfg.lr);
    read_if(j, "momentum", cfg.momentum);
    read_if(j, "mu", cfg.mu);
    read_if(j, "xi_constant", cfg.xi_constant);
    read_if(j, "seed", cfg.seed);
    if (auto it = j.find("method"); it != j.end())
        cfg.method = method_from_string(it->get<std::string>());
    if (auto it = j.find("xi_mode"); it != j.end()) {
        const std::string mode = it->get<std::string>();
        if (mode == "reciprocal_gap")
            cfg.xi_mode = XiMode::reciprocal_gap;
        else if (mode == "constant")
            cfg.xi_mode = XiMode::constant;
        else
            throw ConfigError("base.xi_mode: unknown mode '" + mode + "'");
    }
    if (auto it = j.find("aggregation_weights"); it != j.end()) {
        const std::string w = it->get<std::string>();
        if (w == "data_size")
            cfg.aggregation_weights = AggregationWeights::data_size;
        else if (w == "uniform")
            cfg.aggregation_weights = AggregationWeights::uniform;
        else
            throw ConfigError("base.aggregation_weights: unknown value '" + w + "'");
    }
    return cfg;
}

PartitionSpec parse_partition(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("partition: missing 'kind'");
    PartitionSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dirichlet") {
        check_keys(j, "partition", {"kind", "alpha", "samples_per_client", "seed"});
        spec.kind = PartitionKind::dirichlet;
        read_if(j, "alpha", spec.alpha);
    } else if (kind == "orthogonal") {
        check_keys(j, "partition", {"kind", "num_clusters", "samples_per_client", "seed"});
        spec.kind = PartitionKind::orthogonal;
        read_if(j, "num_clusters", spec.num_clusters);
    } else {
        throw ConfigError("partition.kind: unknown kind '" + kind + "'");
    }
    read_if(j, "samples_per_client", spec.samples_per_client);
    read_if(j, "seed", spec.seed);
    return spec;
}

DatasetSpec parse_dataset(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("dataset: missing 'kind'");
    DatasetSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "synthetic_blobs") {
        check_keys(j, "dataset",
                   {"kind", "n_classes", "dim", "samples_per_class", "test_samples_per_class",
                    "spread", "seed"});
        spec.kind = DatasetKind::synthetic_blobs;
        read_if(j, "n_classes", spec.blobs.n_classes);
        read_if(j, "dim", spec.blobs.dim);
        read_if(j, "samples_per_class", spec.blobs.samples_per_class);
        read_if(j, "test_samples_per_class", spec.blobs.test_samples_per_class);
        read_if(j, "spread", spec.blobs.spread);
        read_if(j, "seed", spec.blobs.seed);
    } else if (kind == "mnist_idx") {
        check_keys(j, "dataset",
                   {"kind", "train_images", "train_labels", "test_images", "test_labels"});
        spec.kind = DatasetKind::mnist_idx;
        spec.mnist.train_images = j.at("train_images").get<std::string>();
        spec.mnist.train_labels = j.at("train_labels").get<std::string>();
        spec.mnist.test_images = j.at("test_images").get<std::string>();
        spec.mnist.test_labels = j.at("test_labels").get<std::string>();
    } else {
        throw ConfigError("dataset.kind: unknown kind '" + kind + "'");
    }
    return spec;
}

}  // namespace

ExperimentPlan plan_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("plan JSON: ") + e.what());
    }
    check_keys(j, "plan",
               {"base", "methods", "method_mu", "seeds", "partition", "target_accuracy",
                "dataset", "hidden_dims"});
    ExperimentPlan plan;
    if (j.contains("base")) plan.base = parse_base(j.at("base"));
    if (!j.contains("methods")) throw ConfigError("plan: missing 'methods'");
    for (const auto& m : j.at("methods"))
        plan.methods.push_back(method_from_string(m.get<std::string>()));
    if (auto it = j.find("method_mu"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("plan.method_mu: expected an object");
        for (auto mit = it->begin(); mit != it->end(); ++mit)
            plan.method_mu[method_from_string(mit.key())] = mit.value().get<double>();
    }
    if (!j.contains("seeds")) throw ConfigError("plan: missing 'seeds'");
    for (const auto& s : j.at("seeds")) plan.seeds.push_back(s.get<std::uint64_t>());
    if (!j.contains("partition")) throw ConfigError("plan: missing 'partition'");
    plan.partition = parse_partition(j.at("partition"));
    read_if(j, "target_accuracy", plan.target_accuracy);
    if (!j.contains("dataset")) throw ConfigError("plan: missing 'dataset'");
    plan.dataset = parse_dataset(j.at("dataset"));
    if (auto it = j.find("hidden_dims"); it != j.end()) {
        plan.hidden_dims.clear();
        for (const auto& h : *it) plan.hidden_dims.push_back(h.get<std::size_t>());
    }
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path + ": cannot open plan file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return plan_from_json(buf.str());
}

}  // namespace fedtrip
