#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedtrip/dataset.hpp"
#include "fedtrip/federation.hpp"
#include "fedtrip/partition.hpp"

namespace fedtrip {

enum class DatasetKind { synthetic_blobs, mnist_idx };

struct BlobSpec {
    int n_classes = 10;
    std::size_t dim = 20;
    int samples_per_class = 600;
    int test_samples_per_class = 100;
    double spread = 0.5;
    std::uint64_t seed = 11;
};

struct MnistPaths {
    std::string train_images;
    std::string train_labels;
    std::string test_images;
    std::string test_labels;
};

struct DatasetSpec {
    DatasetKind kind = DatasetKind::synthetic_blobs;
    BlobSpec blobs;
    MnistPaths mnist;
};

struct ExperimentPlan {
    FederationConfig base;
    std::vector<MethodTag> methods;
    std::map<MethodTag, double> method_mu;  // per-method mu overrides
    std::vector<std::uint64_t> seeds;
    PartitionSpec partition;
    double target_accuracy = 0.85;
    DatasetSpec dataset;
    std::vector<std::size_t> hidden_dims = {100};

    void validate() const;
};

struct LoadedTask {
    Dataset train;
    Dataset test;
};

LoadedTask load_task(const DatasetSpec& spec);

// Model for a task: input dim from the data, hidden layers from the plan.
MlpSpec model_for(const ExperimentPlan& plan, const LoadedTask& task);

// Effective per-run config: plan base with the run's method, seed, and any
// per-method mu override applied.
FederationConfig config_for(const ExperimentPlan& plan, MethodTag method, std::uint64_t seed);

// Partition spec for one run; the shard draw is re-seeded per run seed.
PartitionSpec partition_for(const ExperimentPlan& plan, std::uint64_t seed);

struct RunOutput {
    MethodTag method = MethodTag::fedavg;
    std::uint64_t seed = 0;
    std::vector<RoundRecord> records;
    std::optional<int> rounds_to_target;
    ParamVector final_model;
};

struct SummaryRow {
    std::string method;
    // Median across seeds; unset when the median run never reached target.
    std::optional<double> median_rounds;
    std::string rounds_display;   // "34" or ">100"
    double final_accuracy = 0.0;  // mean of last-10-round accuracy, across seeds
    double total_flops = 0.0;     // mean across seeds
    double total_comm_bytes = 0.0;
    std::string speedup_display;  // vs the first method, ">x"/"<x" bounds propagate
};

struct PlanResult {
    std::vector<RunOutput> runs;
    std::vector<SummaryRow> summary;
};

// First round whose accuracy reaches the target.
std::optional<int> rounds_to_target(const std::vector<RoundRecord>& records, double target);

// Runs every (method, seed) pair (in parallel), writes one curve CSV and
// one checkpoint per run plus summary.csv under out_dir, and returns
// everything. Byte-identical outputs for identical plans.
PlanResult run_plan(const ExperimentPlan& plan, const std::string& out_dir);

struct MuSweepRow {
    double mu = 0.0;
    double final_acc_mean = 0.0;
    double final_acc_std = 0.0;
    // Across seeds that reached target; NaN-free: 0 when none did.
    double rounds_mean = 0.0;
    double rounds_std = 0.0;
    int n_reached = 0;
};

// fedtrip sensitivity sweep over mu; one row per value, stats across the
// plan's seeds. Writes mu_sweep.csv plus per-run curves under out_dir.
std::vector<MuSweepRow> mu_sweep(const ExperimentPlan& plan, const std::vector<double>& mu_values,
                                 const std::string& out_dir);

// Canonical curve CSV: round,test_accuracy,mean_train_loss,cum_flops,
// cum_comm_bytes,selected_ids with ids semicolon-joined.
void write_curve_csv(const std::vector<RoundRecord>& records, const std::string& path);

std::string curve_filename(MethodTag method, std::uint64_t seed);

}  // namespace fedtrip
