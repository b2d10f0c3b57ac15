#include <cstdint>
#include <doctest.h>
#include <fstream>
#include <vector>

#include "fedtrip/checkpoint.hpp"
#include "fedtrip/errors.hpp"
#include "fedtrip/mlp.hpp"
#include "fedtrip/mnist_idx.hpp"
#include "test_util.hpp"

using namespace fedtrip;
using fedtrip::test::TempDir;

namespace {

void write_be32(std::ofstream& out, std::uint32_t v) {
    unsigned char raw[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(raw), 4);
}

// Hand-built 3x3 grayscale fixture with ascending pixel values.
struct IdxFixture {
    TempDir dir{"idx"};
    std::string images = dir.str("images.idx3");
    std::string labels = dir.str("labels.idx1");
    std::vector<unsigned char> pixels;
    std::vector<unsigned char> label_bytes{5, 0, 4, 1};

    IdxFixture() {
        for (int i = 0; i < 4 * 9; ++i)
            pixels.push_back(static_cast<unsigned char>((i * 7) % 256));
        std::ofstream img(images, std::ios::binary);
        write_be32(img, 0x00000803);
        write_be32(img, 4);
        write_be32(img, 3);
        write_be32(img, 3);
        img.write(reinterpret_cast<const char*>(pixels.data()),
                  static_cast<std::streamsize>(pixels.size()));
        img.close();
        std::ofstream lab(labels, std::ios::binary);
        write_be32(lab, 0x00000801);
        write_be32(lab, 4);
        lab.write(reinterpret_cast<const char*>(label_bytes.data()), 4);
    }
};

}  // namespace

TEST_CASE("idx loader decodes the fixture exactly") {
    IdxFixture fx;
    Dataset data = load_mnist_idx(fx.images, fx.labels);
    CHECK(data.size() == 4);
    CHECK(data.dim() == 9);
    CHECK(data.num_classes == 6);  // max label 5
    // Independent decode: raw byte / 255.
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(data.labels[i] == fx.label_bytes[i]);
        for (std::size_t j = 0; j < 9; ++j)
            CHECK(data.features.at(i, j) == fx.pixels[i * 9 + j] / 255.0);
    }
    CHECK(peek_idx_image_dim(fx.images) == 9);
}

TEST_CASE("wrong magic numbers are format errors") {
    IdxFixture fx;
    // Labels file offered as images: image magic check fires.
    CHECK_THROWS_AS(load_mnist_idx(fx.labels, fx.labels), FormatError);
    // Images file offered as labels.
    CHECK_THROWS_AS(load_mnist_idx(fx.images, fx.images), FormatError);
}

TEST_CASE("count mismatch is a format error naming the offset") {
    IdxFixture fx;
    const std::string bad = fx.dir.str("short_labels.idx1");
    std::ofstream lab(bad, std::ios::binary);
    write_be32(lab, 0x00000801);
    write_be32(lab, 3);  // one fewer than the images file
    const unsigned char three[3] = {1, 2, 3};
    lab.write(reinterpret_cast<const char*>(three), 3);
    lab.close();
    try {
        load_mnist_idx(fx.images, bad);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("truncated pixel payload is a format error") {
    IdxFixture fx;
    const std::string bad = fx.dir.str("truncated.idx3");
    std::ofstream img(bad, std::ios::binary);
    write_be32(img, 0x00000803);
    write_be32(img, 4);
    write_be32(img, 3);
    write_be32(img, 3);
    img.write(reinterpret_cast<const char*>(fx.pixels.data()), 20);  // 16 bytes short
    img.close();
    CHECK_THROWS_AS(load_mnist_idx(bad, fx.labels), FormatError);
}

TEST_CASE("idx round-trip reproduces the dataset bit for bit") {
    IdxFixture fx;
    Dataset data = load_mnist_idx(fx.images, fx.labels);
    const std::string img2 = fx.dir.str("rt.idx3"), lab2 = fx.dir.str("rt.idx1");
    save_mnist_idx(data, img2, lab2, 3, 3);
    Dataset again = load_mnist_idx(img2, lab2);
    CHECK(again.labels == data.labels);
    CHECK(again.features.data == data.features.data);
}

TEST_CASE("checkpoint round-trip preserves layout and values") {
    MlpSpec spec{6, {4}, 3};
    ParamVector params = init_mlp_params(spec, 21);
    TempDir dir("ckpt");
    const std::string path = dir.str("model.ckpt");
    save_checkpoint(params, path);
    ParamVector back = load_checkpoint(path);
    CHECK(fedtrip::test::bitwise_equal(back, params));
    REQUIRE(back.layout());
    CHECK(*back.layout() == *params.layout());
}

TEST_CASE("checkpoint loader rejects malformed files") {
    TempDir dir("ckpt_bad");
    const std::string path = dir.str("bad.ckpt");
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTCKPT\n";
    }
    CHECK_THROWS_AS(load_checkpoint(path), FormatError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "FTCKPT 1\nsegments 1\nw 4\ndata 4\nxx";  // payload too short
    }
    CHECK_THROWS_AS(load_checkpoint(path), FormatError);
}
