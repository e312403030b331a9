#pragma once

#include <cstdint>
#include <vector>

#include "clusterlab/matrix.hpp"

namespace clusterlab {

struct KmeansResult {
    std::vector<int> assignments;       // one cluster id in [0, k) per point
    Matrix centroids;                   // k x d
    double inertia = 0.0;               // sum of squared distances to assigned centroids
    std::vector<double> inertia_trace;  // inertia after each assignment step
};

// Lloyd's algorithm with k-means++ seeding, one restart. Deterministic for a
// fixed (points, k, seed): hand-rolled sampling, nearest-centroid ties break
// toward the lowest centroid index, empty clusters keep their previous
// centroid. Stops when the largest centroid movement drops below 1e-8 or
// after 300 iterations.
//
// Throws std::domain_error when there are fewer points than clusters.
KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed);

}  // namespace clusterlab
