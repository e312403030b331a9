#include "clusterlab/bsgc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "clusterlab/kmeans.hpp"
#include "clusterlab/svd.hpp"

namespace clusterlab {

namespace {

constexpr double kDegreeFloor = 1e-12;

}  // namespace

Matrix weight_similarity(const Matrix& w) {
    Matrix out(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) = std::fabs(w(i, j));
    }
    return out;
}

void record_gradient_step(GradTrace& trace, const Matrix& grad) {
    if (!trace.accumulator.same_shape(grad)) {
        throw std::domain_error("record_gradient_step: gradient is " +
                                std::to_string(grad.rows()) + "x" + std::to_string(grad.cols()) +
                                " but the trace holds " + std::to_string(trace.accumulator.rows()) +
                                "x" + std::to_string(trace.accumulator.cols()));
    }
    const double norm = grad.frobenius_norm();
    if (norm == 0.0) return;
    for (std::size_t i = 0; i < grad.rows(); ++i) {
        for (std::size_t j = 0; j < grad.cols(); ++j) {
            trace.accumulator(i, j) += std::fabs(grad(i, j)) / norm;
        }
    }
    ++trace.step_count;
}

Matrix gradient_similarity(const GradTrace& trace) {
    if (trace.step_count < 1) {
        throw std::domain_error("gradient_similarity: no recorded steps");
    }
    Matrix out = trace.accumulator;
    const double scale = 1.0 / static_cast<double>(trace.step_count);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= scale;
    }
    return out;
}

BiClustering bsgc(const Matrix& a, int k, std::uint64_t seed) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (k < 1 || static_cast<std::size_t>(k) > std::min(rows, cols)) {
        throw std::domain_error("bsgc: k = " + std::to_string(k) + " outside [1, " +
                                std::to_string(std::min(rows, cols)) + "]");
    }

    std::vector<double> du(rows, 0.0);
    std::vector<double> dv(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double x = a(i, j);
            if (x < 0.0) {
                throw std::domain_error("bsgc: negative similarity at (" + std::to_string(i) +
                                        "," + std::to_string(j) + ")");
            }
            du[i] += x;
            dv[j] += x;
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        if (du[i] < kDegreeFloor) {
            throw std::domain_error("bsgc: input neuron " + std::to_string(i) +
                                    " has zero degree");
        }
    }
    for (std::size_t j = 0; j < cols; ++j) {
        if (dv[j] < kDegreeFloor) {
            throw std::domain_error("bsgc: output neuron " + std::to_string(j) +
                                    " has zero degree");
        }
    }

    Matrix normalized(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const double si = 1.0 / std::sqrt(du[i]);
        for (std::size_t j = 0; j < cols; ++j) {
            normalized(i, j) = si * a(i, j) / std::sqrt(dv[j]);
        }
    }

    const SvdResult svd = svd_truncated(normalized, k);
    const KmeansResult row_km = kmeans(svd.u, k, seed);
    const KmeansResult col_km = kmeans(svd.v, k, seed);

    auto require_full = [k](const std::vector<int>& assign, const char* side) {
        std::vector<bool> seen(static_cast<std::size_t>(k), false);
        for (int id : assign) seen[static_cast<std::size_t>(id)] = true;
        for (int c = 0; c < k; ++c) {
            if (!seen[static_cast<std::size_t>(c)]) {
                throw std::domain_error("bsgc: degenerate clustering, " + std::string(side) +
                                        " cluster " + std::to_string(c) + " is empty");
            }
        }
    };
    require_full(row_km.assignments, "row");
    require_full(col_km.assignments, "column");

    return align_biclusters(a, row_km.assignments, col_km.assignments, k);
}

BiClustering contiguous_clusters(std::size_t n_rows, std::size_t n_cols, int k) {
    if (k < 1) throw std::domain_error("contiguous_clusters: k must be positive");
    if (static_cast<std::size_t>(k) > n_rows || static_cast<std::size_t>(k) > n_cols) {
        throw std::domain_error("contiguous_clusters: k = " + std::to_string(k) +
                                " exceeds a side of " + std::to_string(n_rows) + "x" +
                                std::to_string(n_cols));
    }
    auto fill = [k](std::size_t n) {
        std::vector<int> ids(n);
        for (std::size_t i = 0; i < n; ++i) {
            ids[i] = static_cast<int>(i * static_cast<std::size_t>(k) / n);
        }
        return ids;
    };
    return BiClustering(k, fill(n_rows), fill(n_cols));
}

BiClustering align_biclusters(const Matrix& w, const std::vector<int>& row_assign,
                              const std::vector<int>& col_assign, int k) {
    if (k < 1) throw std::domain_error("align_biclusters: k must be positive");
    if (k > 8) {
        throw std::domain_error("align_biclusters: k = " + std::to_string(k) +
                                " unsupported (exhaustive alignment caps at 8)");
    }
    if (row_assign.size() != w.rows() || col_assign.size() != w.cols()) {
        throw std::domain_error("align_biclusters: assignment lengths do not match the matrix");
    }

    // within-module mass per (row cluster, relabeled column cluster) pair
    Matrix mass(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            mass(static_cast<std::size_t>(row_assign[i]), static_cast<std::size_t>(col_assign[j])) +=
                w(i, j) * w(i, j);
        }
    }

    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_mass = 0.0;
    for (int u = 0; u < k; ++u) {
        best_mass += mass(static_cast<std::size_t>(u), static_cast<std::size_t>(u));
    }
    while (std::next_permutation(perm.begin(), perm.end())) {
        // column cluster v is relabeled to perm[v], so it pairs with row cluster perm[v]
        double m = 0.0;
        for (int v = 0; v < k; ++v) {
            m += mass(static_cast<std::size_t>(perm[v]), static_cast<std::size_t>(v));
        }
        if (m > best_mass) {
            best_mass = m;
            best = perm;
        }
    }

    std::vector<int> relabeled(col_assign.size());
    for (std::size_t j = 0; j < col_assign.size(); ++j) {
        relabeled[j] = best[static_cast<std::size_t>(col_assign[j])];
    }
    return BiClustering(k, row_assign, std::move(relabeled));
}

}  // namespace clusterlab
