#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace fedtrip {

// One named block of parameters (a weight matrix, a bias vector, ...).
struct LayoutSegment {
    std::string name;
    std::vector<std::size_t> shape;

    std::size_t size() const;
    bool operator==(const LayoutSegment& other) const = default;
};

// Ordered list of segments; the shape metadata shared by every parameter
// vector of one model family.
class Layout {
public:
    Layout() = default;
    explicit Layout(std::vector<LayoutSegment> segments);

    const std::vector<LayoutSegment>& segments() const { return segments_; }
    std::size_t total_size() const { return total_size_; }
    // Offset of segment i into the flat value array.
    std::size_t offset(std::size_t i) const { return offsets_[i]; }

    bool operator==(const Layout& other) const { return segments_ == other.segments_; }

private:
    std::vector<LayoutSegment> segments_;
    std::vector<std::size_t> offsets_;
    std::size_t total_size_ = 0;
};

using LayoutPtr = std::shared_ptr<const Layout>;

LayoutPtr make_layout(std::vector<LayoutSegment> segments);
// Single unnamed segment of length n; convenient for flat vectors.
LayoutPtr make_flat_layout(std::size_t n, const std::string& name = "w");

// Flat vector of 64-bit reals plus its layout. The unit of aggregation,
// regularization and transport.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(LayoutPtr layout, std::vector<double> values);
    // Zero-filled vector for a layout.
    static ParamVector zeros(LayoutPtr layout);

    const LayoutPtr& layout() const { return layout_; }
    std::size_t size() const { return values_.size(); }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    // Pointer into the flat array where segment i starts.
    double* segment(std::size_t i);
    const double* segment(std::size_t i) const;

    bool same_layout(const ParamVector& other) const;
    bool all_finite() const;

private:
    LayoutPtr layout_;
    std::vector<double> values_;
};

// Throws LayoutError unless a and b share a layout.
void require_same_layout(const ParamVector& a, const ParamVector& b, const char* op);

// Elementwise and reduction primitives. All binary ops require identical
// layouts.
ParamVector add(const ParamVector& a, const ParamVector& b);
ParamVector sub(const ParamVector& a, const ParamVector& b);
ParamVector scale(const ParamVector& a, double factor);
double dot(const ParamVector& a, const ParamVector& b);
double l2_norm_sq(const ParamVector& a);
double l2_norm(const ParamVector& a);

// In-place y += alpha * x.
void axpy(ParamVector& y, double alpha, const ParamVector& x);

}  // namespace fedtrip
