#pragma once

#include <string>

#include "fedtrip/dataset.hpp"

namespace fedtrip {

// Reads the classic IDX image/label pair (big-endian headers, magic
// 0x00000803 / 0x00000801). Pixels are scaled to [0,1]; images flatten to
// rows*cols features. Malformed input raises FormatError naming the byte
// offset of the problem.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// Inverse of load_mnist_idx for datasets whose features are 8-bit grayscale
// scaled by 1/255. Feature count must factor as rows*cols given below.
void save_mnist_idx(const Dataset& data, const std::string& images_path,
                    const std::string& labels_path, std::size_t rows = 28, std::size_t cols = 28);

// Feature dimension (rows*cols) read from an IDX image header without
// loading the pixel payload.
std::size_t peek_idx_image_dim(const std::string& images_path);

}  // namespace fedtrip
