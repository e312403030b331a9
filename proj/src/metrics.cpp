#include "clusterlab/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace clusterlab {

namespace {

void check_shapes(const Matrix& w, const BiClustering& clustering, const char* who) {
    if (clustering.row_assign.size() != w.rows() || clustering.col_assign.size() != w.cols()) {
        throw std::domain_error(std::string(who) + ": clustering covers " +
                                std::to_string(clustering.row_assign.size()) + "x" +
                                std::to_string(clustering.col_assign.size()) +
                                " but the matrix is " + std::to_string(w.rows()) + "x" +
                                std::to_string(w.cols()));
    }
}

}  // namespace

ClusterabilityScore clusterability(const Matrix& w, const BiClustering& clustering) {
    check_shapes(w, clustering, "clusterability");
    ClusterabilityScore score;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double m = w(i, j) * w(i, j);
            score.total_mass += m;
            if (clustering.same_module(i, j)) score.within_mass += m;
        }
    }
    if (score.total_mass <= 0.0) {
        throw std::domain_error("clusterability: undefined clusterability for an all-zero matrix");
    }
    score.c = score.within_mass / score.total_mass;
    return score;
}

double clusterability_loss(const Matrix& w, const BiClustering& clustering) {
    return 1.0 - clusterability(w, clustering).c;
}

Matrix clusterability_grad(const Matrix& w, const BiClustering& clustering) {
    const ClusterabilityScore score = clusterability(w, clustering);
    const double c = score.c;
    const double s = score.total_mass;
    Matrix grad(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double ind = clustering.same_module(i, j) ? 1.0 : 0.0;
            grad(i, j) = -2.0 * w(i, j) * (ind - c) / s;
        }
    }
    return grad;
}

double community_structure(const Matrix& a, const BiClustering& clustering) {
    if (a.rows() != a.cols()) {
        throw std::domain_error("community_structure: matrix must be square");
    }
    check_shapes(a, clustering, "community_structure");

    const std::size_t n = a.rows();
    const double tol = 1e-12 * std::max(1.0, a.max_abs());
    double total = 0.0;
    std::vector<double> row_sum(n, 0.0);
    std::vector<double> col_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = a(i, j);
            if (x < 0.0) {
                throw std::domain_error("community_structure: negative weight at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (std::fabs(x - a(j, i)) > tol) {
                throw std::domain_error("community_structure: matrix is not symmetric at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
            }
            total += x;
            row_sum[i] += x;
            col_sum[j] += x;
        }
    }
    if (total <= 0.0) {
        throw std::domain_error("community_structure: all-zero graph");
    }

    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!clustering.same_module(i, j)) continue;
            const double expected = col_sum[j] * row_sum[i] / (2.0 * total);
            q += a(i, j) - expected;
        }
    }
    return q / (2.0 * total);
}

double random_baseline(int k) {
    if (k < 1) throw std::domain_error("random_baseline: k must be positive");
    return 1.0 / static_cast<double>(k);
}

CrossModuleCount cross_module_params(const Matrix& w, const BiClustering& clustering) {
    check_shapes(w, clustering, "cross_module_params");
    CrossModuleCount out;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            if (!clustering.same_module(i, j)) ++out.count;
        }
    }
    out.fraction_of_layer =
        static_cast<double>(out.count) / static_cast<double>(w.rows() * w.cols());
    return out;
}

}  // namespace clusterlab
