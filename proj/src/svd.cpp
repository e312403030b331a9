#include "clusterlab/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace clusterlab {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRotateTol = 1e-14;  // rotate while |<bp,bq>| > tol*|bp||bq|

// Orthogonalizes the columns of b in place (Hestenes one-sided Jacobi) and
// accumulates the rotations into v. Returns the worst off-diagonal ratio
// seen in the final sweep.
double jacobi_orthogonalize(Matrix& b, Matrix& v) {
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    double last_off = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        std::size_t rotations = 0;
        last_off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p);
                    const double bq = b(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                const double scale = std::sqrt(alpha * beta);
                if (scale == 0.0 || std::abs(gamma) <= kRotateTol * scale) {
                    continue;
                }
                last_off = std::max(last_off, std::abs(gamma) / scale);
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p);
                    const double bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
                ++rotations;
            }
        }
        if (rotations == 0) return 0.0;
    }
    std::ostringstream msg;
    msg << "svd: one-sided Jacobi did not converge in " << kMaxSweeps
        << " sweeps (worst off-diagonal ratio " << last_off << ")";
    throw std::runtime_error(msg.str());
}

// Deterministic orthonormal completion for a null-space column: the first
// standard basis vector whose residual after projection is well-conditioned.
void fill_completion_column(Matrix& u, std::size_t col) {
    const std::size_t m = u.rows();
    for (std::size_t basis = 0; basis < m; ++basis) {
        std::vector<double> cand(m, 0.0);
        cand[basis] = 1.0;
        for (std::size_t j = 0; j < col; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < m; ++i) dot += cand[i] * u(i, j);
            for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * u(i, j);
        }
        double norm = 0.0;
        for (double x : cand) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.5) {
            for (std::size_t i = 0; i < m; ++i) u(i, col) = cand[i] / norm;
            return;
        }
    }
    throw std::runtime_error("svd: failed to complete orthonormal basis");
}

}  // namespace

SvdResult svd_truncated(const Matrix& a, int k) {
    const std::size_t min_dim = std::min(a.rows(), a.cols());
    if (k < 1 || static_cast<std::size_t>(k) > min_dim) {
        throw std::domain_error("svd: k must be in [1, min(rows, cols)]");
    }
    if (!a.all_finite()) {
        throw std::domain_error("svd: input has non-finite entries");
    }

    // Work on the orientation whose column count is the smaller dimension.
    const bool transposed = a.cols() > a.rows();
    Matrix b = transposed ? a.transposed() : a;
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();

    Matrix v_full = identity(n);
    jacobi_orthogonalize(b, v_full);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += b(i, j) * b(i, j);
        norms[j] = std::sqrt(sum);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&norms](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    const auto kk = static_cast<std::size_t>(k);
    Matrix u(m, kk);
    Matrix v(n, kk);
    std::vector<double> sigma(kk);
    const double sigma_floor = 1e-300;
    for (std::size_t j = 0; j < kk; ++j) {
        const std::size_t src = order[j];
        sigma[j] = norms[src];
        for (std::size_t i = 0; i < n; ++i) v(i, j) = v_full(i, src);
        if (sigma[j] > sigma_floor) {
            for (std::size_t i = 0; i < m; ++i) u(i, j) = b(i, src) / sigma[j];
        } else {
            sigma[j] = 0.0;
            fill_completion_column(u, j);
        }
    }

    if (transposed) std::swap(u, v);

    // Sign convention: largest-magnitude entry of each left singular vector
    // of the original matrix is >= 0 (lowest index wins ties).
    for (std::size_t j = 0; j < kk; ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const double mag = std::abs(u(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (u(arg, j) < 0.0) {
            for (std::size_t i = 0; i < u.rows(); ++i) u(i, j) = -u(i, j);
            for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
        }
    }

    return SvdResult{std::move(u), std::move(sigma), std::move(v)};
}

}  // namespace clusterlab
