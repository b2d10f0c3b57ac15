#include "fedtrip/synthetic.hpp"

#include "fedtrip/errors.hpp"
#include "fedtrip/rng.hpp"

namespace fedtrip {

Dataset make_synthetic_blobs(int n_classes, std::size_t dim, int samples_per_class,
                             double spread, std::uint64_t seed) {
    if (n_classes <= 0 || dim == 0 || samples_per_class <= 0)
        throw ConfigError("make_synthetic_blobs: sizes must be positive");
    if (spread < 0.0) throw ConfigError("make_synthetic_blobs: spread must be >= 0");

    Dataset data;
    const std::size_t n = static_cast<std::size_t>(n_classes) *
                          static_cast<std::size_t>(samples_per_class);
    data.features = Matrix(n, dim);
    data.labels.resize(n);
    data.num_classes = n_classes;

    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::blobs)}));
    std::size_t row = 0;
    for (int c = 0; c < n_classes; ++c) {
        const std::size_t axis = static_cast<std::size_t>(c) % dim;
        const double magnitude = 1.0 + static_cast<double>(c / static_cast<int>(dim));
        for (int s = 0; s < samples_per_class; ++s, ++row) {
            double* x = data.features.row(row);
            for (std::size_t j = 0; j < dim; ++j) x[j] = spread * rng.normal();
            x[axis] += magnitude;
            data.labels[row] = c;
        }
    }
    data.validate();
    return data;
}

BlobTask make_blob_task(int n_classes, std::size_t dim, int train_per_class, int test_per_class,
                        double spread, std::uint64_t seed) {
    BlobTask task;
    task.train = make_synthetic_blobs(n_classes, dim, train_per_class, spread,
                                      derive_seed({seed, 0x7261696eULL}));
    task.test = make_synthetic_blobs(n_classes, dim, test_per_class, spread,
                                     derive_seed({seed, 0x74657374ULL}));
    return task;
}

}  // namespace fedtrip
