#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fedtrip {

// Named sub-stream tags mixed into derived seeds so that independent parts
// of a run (init, selection, shuffles, ...) never share a stream.
enum class StreamTag : std::uint64_t {
    init = 1,
    select = 2,
    batch_shuffle = 3,
    dirichlet = 4,
    class_pool = 5,
    blobs = 6,
    theory = 7,
    participation = 8,
    partition_base = 9,
};

// splitmix64 step; used both as a stand-alone mixer and for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Collapses (seed, tag, indices...) into one 64-bit stream seed.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Deterministic RNG: mt19937_64 engine (bit-exact per the standard) with
// explicitly-specified distribution algorithms on top, so that seeded runs
// reproduce byte-identically across standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [0, n); unbiased via rejection. n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n);

    // Standard normal via Box-Muller (one spare cached).
    double normal();

    // Gamma(alpha, 1) via Marsaglia-Tsang squeeze; alpha > 0.
    double gamma(double alpha);

    // Bernoulli(p).
    bool bernoulli(double p) { return uniform01() < p; }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, n), ascending order.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fedtrip
