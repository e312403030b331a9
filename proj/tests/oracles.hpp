// Independent reference implementations used only by the tests. Everything
// here is written the slow, obvious way so that agreement with the library is
// meaningful: plain loops, fresh accumulators per quantity, no shared helpers
// with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "clusterlab/biclustering.hpp"
#include "clusterlab/matrix.hpp"
#include "clusterlab/mlp.hpp"

namespace oracles {

// Squared-mass clusterability, straight from the definition.
inline double clusterability(const clusterlab::Matrix& w, const clusterlab::BiClustering& bc) {
    double within = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double sq = w(i, j) * w(i, j);
            total += sq;
            if (bc.row_assign[i] == bc.col_assign[j]) within += sq;
        }
    }
    return within / total;
}

// Central finite differences of 1 - C.
inline clusterlab::Matrix clusterability_loss_fd(const clusterlab::Matrix& w,
                                                 const clusterlab::BiClustering& bc, double h) {
    clusterlab::Matrix grad(w.rows(), w.cols());
    clusterlab::Matrix probe = w;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double saved = probe(i, j);
            probe(i, j) = saved + h;
            const double up = 1.0 - oracles::clusterability(probe, bc);
            probe(i, j) = saved - h;
            const double down = 1.0 - oracles::clusterability(probe, bc);
            probe(i, j) = saved;
            grad(i, j) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

// Community structure with per-pair recomputed sums. Deliberately quadratic
// in everything; only run on tiny graphs.
inline double community_structure(const clusterlab::Matrix& j_mat,
                                  const std::vector<int>& module_of) {
    const std::size_t n = j_mat.rows();
    double grand = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) grand += j_mat(a, b);
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t jj = 0; jj < n; ++jj) {
            if (module_of[i] != module_of[jj]) continue;
            double row_i = 0.0;
            for (std::size_t b = 0; b < n; ++b) row_i += j_mat(i, b);
            double col_j = 0.0;
            for (std::size_t a = 0; a < n; ++a) col_j += j_mat(a, jj);
            const double expected = col_j * row_i / (2.0 * grand);
            q += (j_mat(i, jj) - expected) / (2.0 * grand);
        }
    }
    return q;
}

// Plain-loop forward pass in long double. ReLU on hidden layers, raw logits
// at the end. No masks, no traces.
inline std::vector<double> forward(const clusterlab::MlpModel& model,
                                   const std::vector<double>& input) {
    std::vector<long double> act(input.begin(), input.end());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const clusterlab::Matrix& w = model.weights[l];
        std::vector<long double> next(w.cols(), 0.0L);
        for (std::size_t j = 0; j < w.cols(); ++j) {
            for (std::size_t i = 0; i < w.rows(); ++i) {
                next[j] += act[i] * static_cast<long double>(w(i, j));
            }
        }
        if (l + 1 < model.weights.size()) {
            for (long double& v : next) v = v > 0.0L ? v : 0.0L;
        }
        act = std::move(next);
    }
    return std::vector<double>(act.begin(), act.end());
}

// Long-double cross entropy of one sample, max-shifted.
inline double cross_entropy(const std::vector<double>& logits, int label) {
    long double mx = logits[0];
    for (double v : logits) mx = std::max(mx, static_cast<long double>(v));
    long double sum = 0.0L;
    for (double v : logits) sum += std::exp(static_cast<long double>(v) - mx);
    return static_cast<double>(std::log(sum) - (static_cast<long double>(logits[label]) - mx));
}

// True iff the two labelings induce the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> fwd;
    std::map<int, int> rev;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [fit, fnew] = fwd.emplace(a[i], b[i]);
        if (!fnew && fit->second != b[i]) return false;
        auto [rit, rnew] = rev.emplace(b[i], a[i]);
        if (!rnew && rit->second != a[i]) return false;
    }
    return true;
}

// Eigenvalues of a symmetric matrix by classical two-sided Jacobi. Returns
// them sorted descending. Used to cross-check singular values via the Gram
// matrix: sigma_i = sqrt(eig_i(A^T A)).
inline std::vector<double> symmetric_eigenvalues(clusterlab::Matrix s) {
    const std::size_t n = s.rows();
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        }
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double sip = s(i, p);
                    const double siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double spi = s(p, i);
                    const double sqi = s(q, i);
                    s(p, i) = c * spi - sn * sqi;
                    s(q, i) = sn * spi + c * sqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
    std::sort(eig.rbegin(), eig.rend());
    return eig;
}

inline std::vector<double> singular_values(const clusterlab::Matrix& a) {
    const clusterlab::Matrix at = a.transposed();
    const clusterlab::Matrix gram = clusterlab::matmul(at, a);
    std::vector<double> eig = symmetric_eigenvalues(gram);
    for (double& v : eig) v = std::sqrt(std::max(v, 0.0));
    return eig;
}

// Best achievable k=2 clusterability of a small matrix, by exhaustive
// enumeration of both side partitions. Degenerate (single-cluster) labelings
// are skipped. Exponential; keep rows + cols <= 20 or so.
inline double best_two_cluster_c(const clusterlab::Matrix& w) {
    const std::size_t nr = w.rows();
    const std::size_t nc = w.cols();
    double best = 0.0;
    for (unsigned rm = 1; rm + 1 < (1u << nr); ++rm) {
        std::vector<int> rows(nr);
        for (std::size_t i = 0; i < nr; ++i) rows[i] = (rm >> i) & 1u;
        for (unsigned cm = 1; cm + 1 < (1u << nc); ++cm) {
            std::vector<int> cols(nc);
            for (std::size_t j = 0; j < nc; ++j) cols[j] = (cm >> j) & 1u;
            double within = 0.0;
            double total = 0.0;
            for (std::size_t i = 0; i < nr; ++i) {
                for (std::size_t j = 0; j < nc; ++j) {
                    const double sq = w(i, j) * w(i, j);
                    total += sq;
                    if (rows[i] == cols[j]) within += sq;
                }
            }
            best = std::max(best, within / total);
        }
    }
    return best;
}

}  // namespace oracles
