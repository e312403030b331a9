#pragma once

#include <vector>

#include "clusterlab/matrix.hpp"

namespace clusterlab {

struct SvdResult {
    Matrix u;                   // m x k, orthonormal columns
    std::vector<double> sigma;  // k singular values, non-increasing
    Matrix v;                   // n x k, orthonormal columns
};

// Top-k singular triplets of a dense matrix via one-sided Jacobi applied
// on the smaller dimension. Deterministic: fixed cyclic sweep order, stable
// sort of the spectrum, and a fixed sign convention (the largest-magnitude
// entry of each left singular vector is made non-negative, lowest index
// winning ties).
//
// Throws std::domain_error when k is out of [1, min(rows, cols)] and
// std::runtime_error (with the residual in the message) if the sweep cap
// is hit before convergence.
SvdResult svd_truncated(const Matrix& a, int k);

}  // namespace clusterlab
