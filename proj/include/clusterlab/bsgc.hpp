#pragma once

#include <cstdint>

#include "clusterlab/biclustering.hpp"
#include "clusterlab/matrix.hpp"

namespace clusterlab {

// Accumulated gradient-magnitude statistics for one layer, used to build a
// gradient-based similarity matrix. Owned and updated by the training loop.
struct GradTrace {
    Matrix accumulator;
    int step_count = 0;

    explicit GradTrace(std::size_t rows, std::size_t cols) : accumulator(rows, cols) {}
};

// Element-wise |w|. Similarity must be non-negative for degree normalization.
Matrix weight_similarity(const Matrix& w);

// Adds |grad| / ||grad||_F to the accumulator and increments step_count.
// Zero-gradient steps are skipped. Throws std::domain_error on shape mismatch.
void record_gradient_step(GradTrace& trace, const Matrix& grad);

// accumulator / step_count. Entries lie in [0,1].
// Throws std::domain_error when no steps were recorded.
Matrix gradient_similarity(const GradTrace& trace);

// Bipartite spectral graph clustering:
//   A~ = D_U^{-1/2} A D_V^{-1/2} with D_U, D_V the row/column degree
//   diagonals (floored at 1e-12), top-k SVD, k-means on the rows of U and of
//   V with the same seed, then label alignment so row cluster u pairs with
//   column cluster u.
// Throws std::domain_error for a row or column whose degree falls below the
// floor (naming the neuron), for k outside [1, min(rows, cols)], and when
// k-means leaves a cluster empty on either side.
BiClustering bsgc(const Matrix& a, int k, std::uint64_t seed);

// Equal contiguous blocks on both sides: id of neuron i is floor(i*k/n).
// When k does not divide n the block sizes differ by at most one.
// Throws std::domain_error when k exceeds either dimension.
BiClustering contiguous_clusters(std::size_t n_rows, std::size_t n_cols, int k);

// Relabels the column clusters by the permutation of {0..k-1} that maximizes
// the within-module mass sum W_ij^2. Exhaustive over all k! permutations;
// the identity permutation wins ties, so aligned input comes back unchanged.
// Throws std::domain_error for k > 8.
BiClustering align_biclusters(const Matrix& w, const std::vector<int>& row_assign,
                              const std::vector<int>& col_assign, int k);

}  // namespace clusterlab
