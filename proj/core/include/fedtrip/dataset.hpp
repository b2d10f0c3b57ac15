#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedtrip {

// Dense row-major matrix of 64-bit reals.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Labeled feature matrix: n samples of dimension d, integer labels in
// [0, num_classes).
struct Dataset {
    Matrix features;  // n x d
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }

    // Throws UsageError if empty, non-finite, or labels out of range.
    void validate() const;

    // Gathers the given sample rows into a contiguous batch matrix.
    Matrix gather(std::span<const std::size_t> indices) const;
    std::vector<int> gather_labels(std::span<const std::size_t> indices) const;
};

}  // namespace fedtrip
