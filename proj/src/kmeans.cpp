#include "clusterlab/kmeans.hpp"

#include <cmath>
#include <stdexcept>

#include "clusterlab/rng.hpp"

namespace clusterlab {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kMovementTol = 1e-8;

double sq_dist(const Matrix& points, std::size_t i, const Matrix& centroids, std::size_t c) {
    double sum = 0.0;
    for (std::size_t j = 0; j < points.cols(); ++j) {
        const double d = points(i, j) - centroids(c, j);
        sum += d * d;
    }
    return sum;
}

Matrix seed_centroids(const Matrix& points, int k, Rng& rng) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    Matrix centroids(static_cast<std::size_t>(k), d);

    auto copy_point = [&](std::size_t src, std::size_t dst) {
        for (std::size_t j = 0; j < d; ++j) centroids(dst, j) = points(src, j);
    };

    copy_point(rng.index(n), 0);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points, i, centroids, 0);

    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double x : d2) total += x;
        std::size_t pick;
        if (total <= 0.0) {
            // all remaining points coincide with chosen centroids
            pick = rng.index(n);
        } else {
            const double r = rng.uniform() * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        copy_point(pick, static_cast<std::size_t>(c));
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points, i, centroids, static_cast<std::size_t>(c)));
        }
    }
    return centroids;
}

// Nearest centroid, ties toward the lowest index. Returns inertia.
double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& out) {
    const std::size_t n = points.rows();
    const std::size_t k = centroids.rows();
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_d = sq_dist(points, i, centroids, 0);
        for (std::size_t c = 1; c < k; ++c) {
            const double d = sq_dist(points, i, centroids, c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        out[i] = best;
        inertia += best_d;
    }
    return inertia;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed) {
    if (k < 1) throw std::domain_error("kmeans: k must be positive");
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (n < static_cast<std::size_t>(k)) {
        throw std::domain_error("kmeans: fewer points than clusters");
    }

    Rng rng(seed);
    KmeansResult result;
    result.centroids = seed_centroids(points, k, rng);
    result.assignments.assign(n, 0);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const double inertia = assign_points(points, result.centroids, result.assignments);
        result.inertia_trace.push_back(inertia);

        Matrix next(static_cast<std::size_t>(k), d);
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(result.assignments[i]);
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j) next(c, j) += points(i, j);
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (counts[c] == 0) {
                // empty cluster keeps its previous centroid
                for (std::size_t j = 0; j < d; ++j) next(c, j) = result.centroids(c, j);
                continue;
            }
            double move = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                next(c, j) /= static_cast<double>(counts[c]);
                const double delta = next(c, j) - result.centroids(c, j);
                move += delta * delta;
            }
            movement = std::max(movement, std::sqrt(move));
        }
        result.centroids = std::move(next);
        if (movement < kMovementTol) break;
    }

    // final assignment so (assignments, centroids, inertia) are consistent
    result.inertia = assign_points(points, result.centroids, result.assignments);
    result.inertia_trace.push_back(result.inertia);
    return result;
}

}  // namespace clusterlab
