#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace clusterlab {

// Exact arbitrary-precision count with a base-2 logarithm for display.
struct BigCount {
    mpz_class value;
    double log2 = 0.0;

    std::string to_decimal() const { return value.get_str(); }
};

BigCount make_big_count(mpz_class value);

// Sub-widths of one layer, and optionally of its input side. The output
// sub-widths must be positive; when input sub-widths are given they must
// have the same number of parts.
struct ModularPartition {
    std::vector<int> output_widths;
    std::optional<std::vector<int>> input_widths;

    int output_total() const;
    void validate() const;
};

// Product over hidden layers of 2^{n_l}: the polytope upper bound of a dense
// ReLU network. Throws std::domain_error for an empty list or widths < 1.
BigCount polytope_bound_dense(const std::vector<int>& hidden_widths);

// Half-space pair count of a dense layer: 2^{n_prev} * 2^{n_out}.
BigCount polytope_pair_count_dense(int n_prev, int n_out);

// Modular pair count, as printed: 2^{n_prev}*2^{n^1} + ... + 2^{n_prev}*2^{n^k}.
// The input side stays unpartitioned here.
BigCount polytope_pair_count_modular(int n_prev, const ModularPartition& partition);

// Alternative count with the input side partitioned as well:
// sum of 2^{in^i} * 2^{out^i}. This is a what-if calculator, not the printed
// formula; it needs input_widths and throws without them.
BigCount polytope_pair_count_split_inputs(const ModularPartition& partition);

// Largest m >= 1 with ln(m) < n*eps^2/8, the near-orthogonal vector capacity
// of an n-dimensional space at distortion eps. The candidate from a floating
// exp is verified at m and m+1 with interval arithmetic at adaptive
// precision, so the returned value is exact. Throws std::domain_error for
// eps outside (0,1), n < 1, or a threshold beyond the supported range
// (n*eps^2/8 > 4096, where the exact integer would be astronomically wide).
BigCount jl_capacity(int n, double eps);

struct CapacityComparison {
    double modular_log = 0.0;  // ln(sum of e^{n^i}), via log-sum-exp
    double dense_log = 0.0;    // ln(e^{sum n^i}) = sum n^i
    double gap = 0.0;          // dense_log - modular_log
};

// Exponential-order capacity of a modular layer versus its dense
// counterpart. Throws std::domain_error for an empty partition.
CapacityComparison modular_capacity_comparison(const std::vector<int>& partition);

}  // namespace clusterlab
