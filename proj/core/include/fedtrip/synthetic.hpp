#pragma once

#include <cstdint>

#include "fedtrip/dataset.hpp"

namespace fedtrip {

// Gaussian blob classification task. Class c sits at a deterministic
// simplex-like center (scaled basis vector e_{c mod dim}, magnitude growing
// with each wrap) with isotropic noise of the given spread. Linearly
// separable when spread is small.
Dataset make_synthetic_blobs(int n_classes, std::size_t dim, int samples_per_class,
                             double spread, std::uint64_t seed);

struct BlobTask {
    Dataset train;
    Dataset test;
};

// Train/test pair of the same blob geometry from disjoint derived streams.
BlobTask make_blob_task(int n_classes, std::size_t dim, int train_per_class, int test_per_class,
                        double spread, std::uint64_t seed);

}  // namespace fedtrip
