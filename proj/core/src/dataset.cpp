#include "fedtrip/dataset.hpp"

#include <cmath>
#include <cstring>

#include "fedtrip/errors.hpp"

namespace fedtrip {

void Dataset::validate() const {
    if (features.rows == 0) throw UsageError("Dataset: empty");
    if (labels.size() != features.rows)
        throw UsageError("Dataset: label count does not match sample count");
    for (double v : features.data)
        if (!std::isfinite(v)) throw UsageError("Dataset: non-finite feature entry");
    for (int y : labels)
        if (y < 0 || y >= num_classes) throw UsageError("Dataset: label out of range");
}

Matrix Dataset::gather(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), features.cols);
    for (std::size_t i = 0; i < indices.size(); ++i)
        std::memcpy(out.row(i), features.row(indices[i]), features.cols * sizeof(double));
    return out;
}

std::vector<int> Dataset::gather_labels(std::span<const std::size_t> indices) const {
    std::vector<int> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = labels[indices[i]];
    return out;
}

}  // namespace fedtrip
