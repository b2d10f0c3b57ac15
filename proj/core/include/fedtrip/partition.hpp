#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fedtrip {

enum class PartitionKind { dirichlet, orthogonal };

struct PartitionSpec {
    PartitionKind kind = PartitionKind::dirichlet;
    double alpha = 0.5;        // dirichlet concentration
    int num_clusters = 5;      // orthogonal cluster count
    int samples_per_client = 600;
    std::uint64_t seed = 0;
};

struct PartitionResult {
    // Per-client sample indices into the source dataset, pairwise disjoint,
    // each of size samples_per_client, sorted ascending.
    std::vector<std::vector<std::size_t>> shards;
    // Per-client sample counts per class.
    std::vector<std::vector<std::size_t>> label_histograms;

    int num_clients() const { return static_cast<int>(shards.size()); }
    int num_classes() const {
        return shards.empty() ? 0 : static_cast<int>(label_histograms.front().size());
    }
};

// Label-skew split: each client draws class proportions from
// Dirichlet(alpha * 1_C) on its own seeded stream and samples without
// replacement until its shard is full. When a class pool runs dry the
// remaining proportions renormalize over classes with stock left.
PartitionResult dirichlet_partition(std::span<const int> labels, int n_clients,
                                    const PartitionSpec& spec);

// Cluster split: classes are grouped near-evenly in class-index order into
// num_clusters disjoint groups, clients join clusters round-robin, and each
// client samples IID without replacement from its cluster's classes.
PartitionResult orthogonal_partition(std::span<const int> labels, int n_clients,
                                     const PartitionSpec& spec);

PartitionResult make_partition(std::span<const int> labels, int n_clients,
                               const PartitionSpec& spec);

struct PartitionStats {
    std::vector<double> entropy;            // nats, one per client
    std::vector<double> effective_classes;  // exp(entropy)
};

PartitionStats partition_stats(const PartitionResult& result);

}  // namespace fedtrip
