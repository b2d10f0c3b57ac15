#include "fedtrip/mnist_idx.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "fedtrip/errors.hpp"

namespace fedtrip {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

[[noreturn]] void fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw FormatError(path + " @ byte " + std::to_string(offset) + ": " + what);
}

std::uint32_t read_be32(std::ifstream& in, const std::string& path, std::size_t& offset) {
    unsigned char raw[4];
    in.read(reinterpret_cast<char*>(raw), 4);
    if (in.gcount() != 4) fail(path, offset, "truncated header");
    offset += 4;
    return (std::uint32_t(raw[0]) << 24) | (std::uint32_t(raw[1]) << 16) |
           (std::uint32_t(raw[2]) << 8) | std::uint32_t(raw[3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    unsigned char raw[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(raw), 4);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    return in;
}

}  // namespace

std::size_t peek_idx_image_dim(const std::string& images_path) {
    std::ifstream in = open_input(images_path);
    std::size_t offset = 0;
    const std::uint32_t magic = read_be32(in, images_path, offset);
    if (magic != kImageMagic) fail(images_path, 0, "bad image magic");
    read_be32(in, images_path, offset);  // count
    const std::uint32_t rows = read_be32(in, images_path, offset);
    const std::uint32_t cols = read_be32(in, images_path, offset);
    return static_cast<std::size_t>(rows) * cols;
}

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img = open_input(images_path);
    std::size_t img_off = 0;
    if (read_be32(img, images_path, img_off) != kImageMagic)
        fail(images_path, 0, "bad image magic (want 0x00000803)");
    const std::uint32_t count = read_be32(img, images_path, img_off);
    const std::uint32_t rows = read_be32(img, images_path, img_off);
    const std::uint32_t cols = read_be32(img, images_path, img_off);
    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    if (count == 0 || dim == 0) fail(images_path, 4, "empty image set");

    std::ifstream lab = open_input(labels_path);
    std::size_t lab_off = 0;
    if (read_be32(lab, labels_path, lab_off) != kLabelMagic)
        fail(labels_path, 0, "bad label magic (want 0x00000801)");
    const std::uint32_t label_count = read_be32(lab, labels_path, lab_off);
    if (label_count != count)
        fail(labels_path, 4,
             "label count " + std::to_string(label_count) + " != image count " +
                 std::to_string(count));

    Dataset data;
    data.features = Matrix(count, dim);
    std::vector<unsigned char> buf(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
        if (img.gcount() != static_cast<std::streamsize>(dim))
            fail(images_path, img_off, "truncated pixel data");
        img_off += dim;
        double* row = data.features.row(i);
        for (std::size_t j = 0; j < dim; ++j) row[j] = buf[j] / 255.0;
    }

    data.labels.resize(count);
    std::vector<unsigned char> lbuf(count);
    lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(count));
    if (lab.gcount() != static_cast<std::streamsize>(count))
        fail(labels_path, lab_off, "truncated label data");
    int max_label = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        data.labels[i] = lbuf[i];
        max_label = std::max(max_label, static_cast<int>(lbuf[i]));
    }
    data.num_classes = max_label + 1;
    data.validate();
    return data;
}

void save_mnist_idx(const Dataset& data, const std::string& images_path,
                    const std::string& labels_path, std::size_t rows, std::size_t cols) {
    if (rows * cols != data.dim())
        throw UsageError("save_mnist_idx: rows*cols does not match feature dimension");
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw FormatError(images_path + ": cannot open for writing");
    write_be32(img, kImageMagic);
    write_be32(img, static_cast<std::uint32_t>(data.size()));
    write_be32(img, static_cast<std::uint32_t>(rows));
    write_be32(img, static_cast<std::uint32_t>(cols));
    std::vector<unsigned char> buf(data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* row = data.features.row(i);
        for (std::size_t j = 0; j < data.dim(); ++j)
            buf[j] = static_cast<unsigned char>(std::lround(row[j] * 255.0));
        img.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw FormatError(labels_path + ": cannot open for writing");
    write_be32(lab, kLabelMagic);
    write_be32(lab, static_cast<std::uint32_t>(data.size()));
    for (int y : data.labels) {
        const unsigned char b = static_cast<unsigned char>(y);
        lab.write(reinterpret_cast<const char*>(&b), 1);
    }
}

}  // namespace fedtrip
