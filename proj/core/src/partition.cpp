#include "fedtrip/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedtrip/errors.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

namespace {

int count_classes(std::span<const int> labels) {
    int c = 0;
    for (int y : labels) {
        if (y < 0) throw UsageError("partition: negative label");
        c = std::max(c, y + 1);
    }
    return c;
}

// Per-class index pools, each shuffled from its own derived stream so that
// draws are order-independent of the dataset layout.
std::vector<std::vector<std::size_t>> shuffled_class_pools(std::span<const int> labels,
                                                           int num_classes,
                                                           std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> pools(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i)
        pools[static_cast<std::size_t>(labels[i])].push_back(i);
    for (int c = 0; c < num_classes; ++c) {
        Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::class_pool),
                             static_cast<std::uint64_t>(c)}));
        rng.shuffle(pools[static_cast<std::size_t>(c)]);
    }
    return pools;
}

void check_capacity(std::span<const int> labels, int n_clients, const PartitionSpec& spec) {
    if (n_clients <= 0) throw ConfigError("partition: n_clients must be positive");
    if (spec.samples_per_client <= 0)
        throw ConfigError("partition: samples_per_client must be positive");
    const std::size_t wanted =
        static_cast<std::size_t>(n_clients) * static_cast<std::size_t>(spec.samples_per_client);
    if (wanted > labels.size())
        throw CapacityError("partition: need " + std::to_string(wanted) + " samples, dataset has " +
                            std::to_string(labels.size()));
}

PartitionResult finalize(std::vector<std::vector<std::size_t>> shards,
                         std::span<const int> labels, int num_classes) {
    PartitionResult result;
    result.label_histograms.resize(shards.size(),
                                   std::vector<std::size_t>(static_cast<std::size_t>(num_classes), 0));
    for (std::size_t k = 0; k < shards.size(); ++k) {
        std::sort(shards[k].begin(), shards[k].end());
        for (std::size_t idx : shards[k])
            ++result.label_histograms[k][static_cast<std::size_t>(labels[idx])];
    }
    result.shards = std::move(shards);
    return result;
}

}  // namespace

PartitionResult dirichlet_partition(std::span<const int> labels, int n_clients,
                                    const PartitionSpec& spec) {
    if (spec.kind != PartitionKind::dirichlet)
        throw ConfigError("dirichlet_partition: spec.kind is not dirichlet");
    if (!(spec.alpha > 0.0)) throw ConfigError("dirichlet_partition: alpha must be > 0");
    check_capacity(labels, n_clients, spec);
    const int num_classes = count_classes(labels);

    auto pools = shuffled_class_pools(labels, num_classes, spec.seed);
    std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(n_clients));

    for (int k = 0; k < n_clients; ++k) {
        Rng stream(derive_seed({spec.seed, static_cast<std::uint64_t>(StreamTag::dirichlet),
                                static_cast<std::uint64_t>(k)}));
        // Gamma(alpha,1) draws normalized onto the simplex.
        std::vector<double> prop(static_cast<std::size_t>(num_classes));
        double total = 0.0;
        for (double& p : prop) {
            p = stream.gamma(spec.alpha);
            total += p;
        }
        for (double& p : prop) p /= total;

        auto& shard = shards[static_cast<std::size_t>(k)];
        shard.reserve(static_cast<std::size_t>(spec.samples_per_client));
        while (shard.size() < static_cast<std::size_t>(spec.samples_per_client)) {
            double stocked_mass = 0.0;
            for (int c = 0; c < num_classes; ++c)
                if (!pools[static_cast<std::size_t>(c)].empty())
                    stocked_mass += prop[static_cast<std::size_t>(c)];
            if (stocked_mass <= 0.0)
                throw CapacityError("dirichlet_partition: all class pools exhausted");
            // Categorical draw over classes with stock, renormalized.
            double u = stream.uniform01() * stocked_mass;
            int chosen = -1;
            for (int c = 0; c < num_classes; ++c) {
                auto& pool = pools[static_cast<std::size_t>(c)];
                if (pool.empty()) continue;
                chosen = c;
                u -= prop[static_cast<std::size_t>(c)];
                if (u < 0.0) break;
            }
            auto& pool = pools[static_cast<std::size_t>(chosen)];
            shard.push_back(pool.back());
            pool.pop_back();
        }
    }
    return finalize(std::move(shards), labels, num_classes);
}

PartitionResult orthogonal_partition(std::span<const int> labels, int n_clients,
                                     const PartitionSpec& spec) {
    if (spec.kind != PartitionKind::orthogonal)
        throw ConfigError("orthogonal_partition: spec.kind is not orthogonal");
    if (spec.num_clusters <= 0) throw ConfigError("orthogonal_partition: num_clusters must be > 0");
    check_capacity(labels, n_clients, spec);
    const int num_classes = count_classes(labels);
    if (spec.num_clusters > num_classes)
        throw ConfigError("orthogonal_partition: more clusters (" +
                          std::to_string(spec.num_clusters) + ") than classes (" +
                          std::to_string(num_classes) + ")");

    // Near-even class groups in ascending class order; the first
    // (C mod clusters) groups take one extra class.
    const int base = num_classes / spec.num_clusters;
    const int extra = num_classes % spec.num_clusters;
    std::vector<std::vector<int>> cluster_classes(static_cast<std::size_t>(spec.num_clusters));
    int next_class = 0;
    for (int g = 0; g < spec.num_clusters; ++g) {
        const int take = base + (g < extra ? 1 : 0);
        for (int i = 0; i < take; ++i) cluster_classes[static_cast<std::size_t>(g)].push_back(next_class++);
    }

    auto pools = shuffled_class_pools(labels, num_classes, spec.seed);
    // One IID pool per cluster: interleave its classes' shuffled pools with
    // a per-cluster shuffle.
    std::vector<std::vector<std::size_t>> cluster_pools(static_cast<std::size_t>(spec.num_clusters));
    for (int g = 0; g < spec.num_clusters; ++g) {
        auto& merged = cluster_pools[static_cast<std::size_t>(g)];
        for (int c : cluster_classes[static_cast<std::size_t>(g)]) {
            auto& pool = pools[static_cast<std::size_t>(c)];
            merged.insert(merged.end(), pool.begin(), pool.end());
        }
        Rng rng(derive_seed({spec.seed, static_cast<std::uint64_t>(StreamTag::partition_base),
                             static_cast<std::uint64_t>(g)}));
        rng.shuffle(merged);
    }

    std::vector<std::vector<std::size_t>> shards(static_cast<std::size_t>(n_clients));
    std::vector<std::size_t> cursor(static_cast<std::size_t>(spec.num_clusters), 0);
    for (int k = 0; k < n_clients; ++k) {
        const std::size_t g = static_cast<std::size_t>(k % spec.num_clusters);
        auto& pool = cluster_pools[g];
        std::size_t& pos = cursor[g];
        if (pos + static_cast<std::size_t>(spec.samples_per_client) > pool.size())
            throw CapacityError("orthogonal_partition: cluster " + std::to_string(g) +
                                " cannot supply client " + std::to_string(k));
        auto& shard = shards[static_cast<std::size_t>(k)];
        shard.assign(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                     pool.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(spec.samples_per_client)));
        pos += static_cast<std::size_t>(spec.samples_per_client);
    }
    return finalize(std::move(shards), labels, num_classes);
}

PartitionResult make_partition(std::span<const int> labels, int n_clients,
                               const PartitionSpec& spec) {
    return spec.kind == PartitionKind::dirichlet ? dirichlet_partition(labels, n_clients, spec)
                                                 : orthogonal_partition(labels, n_clients, spec);
}

PartitionStats partition_stats(const PartitionResult& result) {
    PartitionStats stats;
    stats.entropy.reserve(result.label_histograms.size());
    stats.effective_classes.reserve(result.label_histograms.size());
    for (const auto& hist : result.label_histograms) {
        std::size_t total = 0;
        for (std::size_t c : hist) total += c;
        double h = 0.0;
        for (std::size_t c : hist) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(total);
            h -= p * std::log(p);
        }
        stats.entropy.push_back(h);
        stats.effective_classes.push_back(std::exp(h));
    }
    return stats;
}

}  // namespace fedtrip
