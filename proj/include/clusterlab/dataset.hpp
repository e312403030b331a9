#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clusterlab {

enum class Split { Train, Test };

// Labeled feature set. Features live in [0,1]; immutable after load.
struct Dataset {
    Matrix features;  // samples x feature width
    std::vector<int> labels;
    int n_classes = 0;
    Split split = Split::Train;

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

// Raised on malformed or inconsistent dataset files.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Reads the big-endian IDX pair (images magic 0x00000803, labels magic
// 0x00000801). Pixels are scaled by 1/255 and images flattened row-major.
// Throws DataError for a wrong magic, truncated payload, or image/label
// count mismatch, naming the file and the counts involved.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 Split split = Split::Train);

// Seeded Gaussian class blobs, fully offline. Class c gets mean 0.85 on its
// own contiguous block of coordinates and 0.15 elsewhere, sigma 0.05,
// clipped to [0,1]; the blocks keep classes far apart, so a linear model
// separates them easily. Requires dim >= n_classes.
Dataset synthetic_blobs(int n_classes, int dim, int per_class, std::uint64_t seed,
                        Split split = Split::Train);

struct Batch {
    Matrix features;
    std::vector<int> labels;
};

// Seeded per-epoch shuffle into batches; the final partial batch is kept.
// The order is a pure function of (seed, epoch).
std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, int epoch,
                           std::uint64_t seed);

}  // namespace clusterlab
