#pragma once

#include "clusterlab/biclustering.hpp"
#include "clusterlab/matrix.hpp"

namespace clusterlab {

// Fraction of squared weight mass that stays inside a cluster.
struct ClusterabilityScore {
    double c = 0.0;            // within_mass / total_mass
    double within_mass = 0.0;  // sum of W_ij^2 over same-module pairs
    double total_mass = 0.0;   // sum of W_ij^2
};

// C = sum W_ij^2 * [row i and col j share a cluster] / sum W_ij^2.
// Throws std::domain_error for an all-zero matrix (undefined clusterability)
// or mismatched assignment lengths.
ClusterabilityScore clusterability(const Matrix& w, const BiClustering& clustering);

// L_C = 1 - C.
double clusterability_loss(const Matrix& w, const BiClustering& clustering);

// Analytic gradient of L_C:
//   dL_C/dW_ij = -2 * W_ij * (I_ij - C) / S,   S = sum W^2
// where I_ij is the same-module indicator.
Matrix clusterability_grad(const Matrix& w, const BiClustering& clustering);

// Community structure of a square symmetric non-negative graph:
//   Q = 1/(2 sum W) * sum over same-module (i,j) of (W_ij - E[J_ij])
//   E[J_ij] = (col sum j)(row sum i) / (2 sum W)
// With k=1 this gives Q = 1/4 rather than the Newman value 0; the formula is
// kept in this exact shape on purpose.
double community_structure(const Matrix& a, const BiClustering& clustering);

// Expected clusterability of a random equal-size clustering: 1/k.
double random_baseline(int k);

struct CrossModuleCount {
    long long count = 0;
    double fraction_of_layer = 0.0;
};

// Number of weight positions whose row and column clusters differ.
CrossModuleCount cross_module_params(const Matrix& w, const BiClustering& clustering);

}  // namespace clusterlab
