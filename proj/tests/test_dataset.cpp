#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "clusterlab/dataset.hpp"

using clusterlab::Dataset;
using clusterlab::Split;

namespace {

void write_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "clusterlab_idx_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_images(const std::string& name, std::uint32_t magic, std::uint32_t count,
                         std::uint32_t rows, std::uint32_t cols,
                         const std::vector<unsigned char>& pixels) {
    const auto path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    write_be32(out, magic);
    write_be32(out, count);
    write_be32(out, rows);
    write_be32(out, cols);
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    return path.string();
}

std::string write_labels(const std::string& name, std::uint32_t magic, std::uint32_t count,
                         const std::vector<unsigned char>& labels) {
    const auto path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    write_be32(out, magic);
    write_be32(out, count);
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    return path.string();
}

}  // namespace

TEST_CASE("idx loader round-trips a tiny handcrafted file") {
    // Three 2x2 images with pixel value = 10 * index.
    std::vector<unsigned char> pixels(12);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = static_cast<unsigned char>(10 * i);
    }
    const std::string img = write_images("ok-images", 0x803, 3, 2, 2, pixels);
    const std::string lab = write_labels("ok-labels", 0x801, 3, {7, 0, 9});

    const Dataset ds = clusterlab::load_idx(img, lab, Split::Test);
    CHECK(ds.split == Split::Test);
    CHECK(ds.size() == 3);
    CHECK(ds.n_classes == 10);
    CHECK(ds.features.cols() == 4);
    CHECK(ds.labels == std::vector<int>{7, 0, 9});
    CHECK(ds.features(0, 0) == 0.0);
    CHECK(ds.features(0, 3) == doctest::Approx(30.0 / 255.0));
    CHECK(ds.features(2, 3) == doctest::Approx(110.0 / 255.0));
}

TEST_CASE("idx loader reports malformed files") {
    const std::vector<unsigned char> pixels(4, 1);
    const std::string img = write_images("bad-magic-images", 0x805, 1, 2, 2, pixels);
    const std::string lab = write_labels("bad-magic-labels", 0x801, 1, {1});
    CHECK_THROWS_WITH_AS(clusterlab::load_idx(img, lab), doctest::Contains("2051"),
                         clusterlab::DataError);

    const std::string img2 = write_images("count-images", 0x803, 2, 2, 1, {1, 2, 3, 4});
    const std::string lab2 = write_labels("count-labels", 0x801, 3, {1, 2, 3});
    CHECK_THROWS_WITH_AS(clusterlab::load_idx(img2, lab2), doctest::Contains("2 images"),
                         clusterlab::DataError);

    const std::string img3 = write_images("short-images", 0x803, 2, 2, 2, {1, 2, 3});
    const std::string lab3 = write_labels("short-labels", 0x801, 2, {1, 2});
    CHECK_THROWS_WITH_AS(clusterlab::load_idx(img3, lab3), doctest::Contains("truncated"),
                         clusterlab::DataError);

    CHECK_THROWS_AS(clusterlab::load_idx("/nonexistent/img", "/nonexistent/lab"),
                    clusterlab::DataError);
}

TEST_CASE("synthetic blobs are seeded, bounded, and class-structured") {
    const Dataset a = clusterlab::synthetic_blobs(4, 16, 25, 9);
    const Dataset b = clusterlab::synthetic_blobs(4, 16, 25, 9);
    const Dataset c = clusterlab::synthetic_blobs(4, 16, 25, 10);
    CHECK(a.size() == 100);
    CHECK(a.features(0, 0) == b.features(0, 0));
    CHECK(a.features(0, 0) != c.features(0, 0));
    a.validate();

    // Class c is brightest on its own feature block.
    for (int cls = 0; cls < 4; ++cls) {
        double on_block = 0.0;
        double off_block = 0.0;
        for (int s = 0; s < 25; ++s) {
            const std::size_t row = static_cast<std::size_t>(cls) * 25 + s;
            CHECK(a.labels[row] == cls);
            for (std::size_t j = 0; j < 16; ++j) {
                const bool own = j / 4 == static_cast<std::size_t>(cls);
                (own ? on_block : off_block) += a.features(row, j);
            }
        }
        CHECK(on_block / (25.0 * 4.0) > 0.7);
        CHECK(off_block / (25.0 * 12.0) < 0.3);
    }
    CHECK_THROWS_AS(clusterlab::synthetic_blobs(10, 4, 5, 0), clusterlab::DataError);
}

TEST_CASE("batches shuffle deterministically per epoch") {
    const Dataset ds = clusterlab::synthetic_blobs(3, 6, 11, 4);  // 33 samples
    const std::vector<clusterlab::Batch> e0 = clusterlab::batches(ds, 8, 0, 42);
    const std::vector<clusterlab::Batch> e0_again = clusterlab::batches(ds, 8, 0, 42);
    const std::vector<clusterlab::Batch> e1 = clusterlab::batches(ds, 8, 1, 42);

    REQUIRE(e0.size() == 5);  // 4 full batches + remainder of 1
    CHECK(e0.back().labels.size() == 1);
    CHECK(e0[0].features(0, 0) == e0_again[0].features(0, 0));
    CHECK(e0[0].labels == e0_again[0].labels);

    // Different epoch, different order; same multiset of labels overall.
    std::vector<int> flat0;
    std::vector<int> flat1;
    for (const clusterlab::Batch& b : e0) flat0.insert(flat0.end(), b.labels.begin(), b.labels.end());
    for (const clusterlab::Batch& b : e1) flat1.insert(flat1.end(), b.labels.begin(), b.labels.end());
    CHECK(flat0 != flat1);
    std::multiset<int> m0(flat0.begin(), flat0.end());
    std::multiset<int> m1(flat1.begin(), flat1.end());
    CHECK(m0 == m1);
}
