#pragma once

#include <cstddef>
#include <vector>

namespace clusterlab {

// Joint partition of the rows (input neurons) and columns (output neurons)
// of one weight matrix into k shared clusters. Weight W(i, j) is
// "within-cluster" when row i and column j carry the same cluster id.
struct BiClustering {
    int k = 0;
    std::vector<int> row_assign;
    std::vector<int> col_assign;

    BiClustering() = default;
    BiClustering(int k_, std::vector<int> rows, std::vector<int> cols);

    // Throws std::domain_error unless k >= 1, both vectors are non-empty,
    // every id lies in [0, k), and every cluster has at least one member on
    // each side.
    void validate() const;

    bool same_module(std::size_t row, std::size_t col) const {
        return row_assign[row] == col_assign[col];
    }
};

// True when the two clusterings induce the same partition after some
// relabeling of cluster ids (rows and columns relabeled together).
bool equivalent_clusterings(const BiClustering& a, const BiClustering& b);

}  // namespace clusterlab
