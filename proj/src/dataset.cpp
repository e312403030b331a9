#include "clusterlab/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "clusterlab/rng.hpp"

namespace clusterlab {

void Dataset::validate() const {
    if (n_classes < 1) throw DataError("Dataset: n_classes must be positive");
    if (labels.size() != features.rows()) {
        throw DataError("Dataset: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(features.rows()) + " feature rows");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) {
            throw DataError("Dataset: label " + std::to_string(labels[i]) + " at sample " +
                            std::to_string(i) + " out of [0, " + std::to_string(n_classes) + ")");
        }
    }
    for (double x : features.data()) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw DataError("Dataset: feature value " + std::to_string(x) + " outside [0,1]");
        }
    }
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path, const char* field) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4)) {
        throw DataError("load_idx: " + path + ": truncated while reading " + field);
    }
    return (static_cast<std::uint32_t>(buf[0]) << 24) | (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path, Split split) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw DataError("load_idx: cannot open " + images_path);
    const std::uint32_t img_magic = read_be32(img, images_path, "magic");
    if (img_magic != 0x00000803u) {
        throw DataError("load_idx: " + images_path + ": bad magic " + std::to_string(img_magic) +
                        ", expected 2051");
    }
    const std::uint32_t n_images = read_be32(img, images_path, "count");
    const std::uint32_t n_rows = read_be32(img, images_path, "rows");
    const std::uint32_t n_cols = read_be32(img, images_path, "cols");
    if (n_images == 0 || n_rows == 0 || n_cols == 0) {
        throw DataError("load_idx: " + images_path + ": empty dimension in header");
    }

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw DataError("load_idx: cannot open " + labels_path);
    const std::uint32_t lab_magic = read_be32(lab, labels_path, "magic");
    if (lab_magic != 0x00000801u) {
        throw DataError("load_idx: " + labels_path + ": bad magic " + std::to_string(lab_magic) +
                        ", expected 2049");
    }
    const std::uint32_t n_labels = read_be32(lab, labels_path, "count");
    if (n_labels != n_images) {
        throw DataError("load_idx: " + std::to_string(n_images) + " images in " + images_path +
                        " but " + std::to_string(n_labels) + " labels in " + labels_path);
    }

    const std::size_t width = static_cast<std::size_t>(n_rows) * n_cols;
    const std::size_t total = static_cast<std::size_t>(n_images) * width;
    std::vector<unsigned char> pixels(total);
    if (!img.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(total))) {
        throw DataError("load_idx: " + images_path + ": truncated pixel payload, expected " +
                        std::to_string(total) + " bytes");
    }
    std::vector<unsigned char> raw_labels(n_images);
    if (!lab.read(reinterpret_cast<char*>(raw_labels.data()),
                  static_cast<std::streamsize>(n_images))) {
        throw DataError("load_idx: " + labels_path + ": truncated label payload, expected " +
                        std::to_string(n_images) + " bytes");
    }

    Dataset ds;
    ds.split = split;
    ds.n_classes = 10;
    ds.features = Matrix(n_images, width);
    for (std::size_t i = 0; i < total; ++i) {
        ds.features.data()[i] = static_cast<double>(pixels[i]) / 255.0;
    }
    ds.labels.resize(n_images);
    for (std::uint32_t i = 0; i < n_images; ++i) ds.labels[i] = raw_labels[i];
    ds.validate();
    return ds;
}

Dataset synthetic_blobs(int n_classes, int dim, int per_class, std::uint64_t seed, Split split) {
    if (n_classes < 1 || dim < 1 || per_class < 1) {
        throw DataError("synthetic_blobs: all sizes must be positive");
    }
    if (dim < n_classes) {
        throw DataError("synthetic_blobs: dim " + std::to_string(dim) + " smaller than " +
                        std::to_string(n_classes) + " classes");
    }
    constexpr double kBase = 0.15;
    constexpr double kPeak = 0.85;
    constexpr double kSigma = 0.05;

    const auto n = static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(per_class);
    const auto d = static_cast<std::size_t>(dim);
    Dataset ds;
    ds.split = split;
    ds.n_classes = n_classes;
    ds.features = Matrix(n, d);
    ds.labels.resize(n);

    Rng rng(seed);
    std::size_t sample = 0;
    for (int c = 0; c < n_classes; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * d / static_cast<std::size_t>(n_classes);
        const std::size_t hi =
            static_cast<std::size_t>(c + 1) * d / static_cast<std::size_t>(n_classes);
        for (int s = 0; s < per_class; ++s, ++sample) {
            ds.labels[sample] = c;
            for (std::size_t j = 0; j < d; ++j) {
                const double mean = (j >= lo && j < hi) ? kPeak : kBase;
                ds.features(sample, j) = std::clamp(mean + kSigma * rng.gaussian(), 0.0, 1.0);
            }
        }
    }
    return ds;
}

std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, int epoch,
                           std::uint64_t seed) {
    if (batch_size < 1) throw DataError("batches: batch_size must be positive");
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0xB5u + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.index(i)]);
    }

    std::vector<Batch> out;
    const std::size_t width = dataset.features.cols();
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t count = std::min(batch_size, n - start);
        Batch b;
        b.features = Matrix(count, width);
        b.labels.resize(count);
        for (std::size_t r = 0; r < count; ++r) {
            const std::size_t src = order[start + r];
            for (std::size_t j = 0; j < width; ++j) b.features(r, j) = dataset.features(src, j);
            b.labels[r] = dataset.labels[src];
        }
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace clusterlab
