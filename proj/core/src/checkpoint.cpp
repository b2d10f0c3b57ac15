#include "fedtrip/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fedtrip/errors.hpp"

namespace fedtrip {

namespace {

void put_le64(std::ofstream& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char raw[8];
    for (int i = 0; i < 8; ++i) raw[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(raw), 8);
}

double get_le64(std::ifstream& in, const std::string& path) {
    unsigned char raw[8];
    in.read(reinterpret_cast<char*>(raw), 8);
    if (in.gcount() != 8) throw FormatError(path + ": truncated checkpoint payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ParamVector& params, const std::string& path) {
    if (!params.layout()) throw UsageError("save_checkpoint: params have no layout");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << "FTCKPT 1\n";
    out << "segments " << params.layout()->segments().size() << "\n";
    for (const auto& seg : params.layout()->segments()) {
        out << seg.name;
        for (std::size_t d : seg.shape) out << ' ' << d;
        out << "\n";
    }
    out << "data " << params.size() << "\n";
    for (std::size_t i = 0; i < params.size(); ++i) put_le64(out, params[i]);
    if (!out) throw FormatError(path + ": write failed");
}

ParamVector load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || line != "FTCKPT 1")
        throw FormatError(path + ": bad checkpoint magic");
    std::size_t n_segments = 0;
    if (!std::getline(in, line) || std::sscanf(line.c_str(), "segments %zu", &n_segments) != 1)
        throw FormatError(path + ": bad segment count line");
    std::vector<LayoutSegment> segs;
    segs.reserve(n_segments);
    for (std::size_t i = 0; i < n_segments; ++i) {
        if (!std::getline(in, line)) throw FormatError(path + ": truncated segment list");
        std::istringstream parts(line);
        LayoutSegment seg;
        if (!(parts >> seg.name)) throw FormatError(path + ": empty segment line");
        std::size_t d;
        while (parts >> d) seg.shape.push_back(d);
        if (seg.shape.empty()) throw FormatError(path + ": segment '" + seg.name + "' has no shape");
        segs.push_back(std::move(seg));
    }
    std::size_t count = 0;
    if (!std::getline(in, line) || std::sscanf(line.c_str(), "data %zu", &count) != 1)
        throw FormatError(path + ": bad data count line");
    LayoutPtr layout = make_layout(std::move(segs));
    if (layout->total_size() != count)
        throw FormatError(path + ": data count does not match layout size");
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = get_le64(in, path);
    return ParamVector(std::move(layout), std::move(values));
}

}  // namespace fedtrip
