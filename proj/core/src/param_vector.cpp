#include "fedtrip/param_vector.hpp"

#include <cmath>

#include "fedtrip/errors.hpp"

namespace fedtrip {

std::size_t LayoutSegment::size() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
}

Layout::Layout(std::vector<LayoutSegment> segments) : segments_(std::move(segments)) {
    offsets_.reserve(segments_.size());
    for (const auto& seg : segments_) {
        offsets_.push_back(total_size_);
        total_size_ += seg.size();
    }
}

LayoutPtr make_layout(std::vector<LayoutSegment> segments) {
    return std::make_shared<const Layout>(std::move(segments));
}

LayoutPtr make_flat_layout(std::size_t n, const std::string& name) {
    return make_layout({LayoutSegment{name, {n}}});
}

ParamVector::ParamVector(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
    if (!layout_) throw UsageError("ParamVector: null layout");
    if (values_.size() != layout_->total_size())
        throw LayoutError("ParamVector: value count does not match layout size");
}

ParamVector ParamVector::zeros(LayoutPtr layout) {
    std::vector<double> v(layout->total_size(), 0.0);
    return ParamVector(std::move(layout), std::move(v));
}

double* ParamVector::segment(std::size_t i) { return values_.data() + layout_->offset(i); }
const double* ParamVector::segment(std::size_t i) const {
    return values_.data() + layout_->offset(i);
}

bool ParamVector::same_layout(const ParamVector& other) const {
    if (layout_ == other.layout_) return true;
    if (!layout_ || !other.layout_) return false;
    return *layout_ == *other.layout_;
}

bool ParamVector::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_same_layout(const ParamVector& a, const ParamVector& b, const char* op) {
    if (!a.same_layout(b)) throw LayoutError(std::string(op) + ": layout mismatch");
}

ParamVector add(const ParamVector& a, const ParamVector& b) {
    require_same_layout(a, b, "add");
    ParamVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

ParamVector sub(const ParamVector& a, const ParamVector& b) {
    require_same_layout(a, b, "sub");
    ParamVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

ParamVector scale(const ParamVector& a, double factor) {
    ParamVector out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
    return out;
}

double dot(const ParamVector& a, const ParamVector& b) {
    require_same_layout(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm_sq(const ParamVector& a) { return dot(a, a); }

double l2_norm(const ParamVector& a) { return std::sqrt(l2_norm_sq(a)); }

void axpy(ParamVector& y, double alpha, const ParamVector& x) {
    require_same_layout(y, x, "axpy");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace fedtrip
