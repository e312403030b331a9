#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "clusterlab/biclustering.hpp"
#include "clusterlab/matrix.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"
#include "oracles.hpp"

using clusterlab::BiClustering;
using clusterlab::Matrix;
using clusterlab::Rng;

namespace {

BiClustering contiguous(int k, std::size_t rows, std::size_t cols) {
    std::vector<int> ra(rows);
    std::vector<int> ca(cols);
    for (std::size_t i = 0; i < rows; ++i) ra[i] = static_cast<int>(i * k / rows);
    for (std::size_t j = 0; j < cols; ++j) ca[j] = static_cast<int>(j * k / cols);
    return BiClustering(k, ra, ca);
}

BiClustering graph_partition(const std::vector<int>& labels) {
    const int k = 1 + *std::max_element(labels.begin(), labels.end());
    return BiClustering(k, labels, labels);
}

// Integer-valued matrix so that sums of squares are exact in doubles, which
// makes the invariance checks legitimate bitwise assertions.
Matrix random_integer_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(i, j) = static_cast<double>(rng.index(9)) - 4.0;
        }
    }
    if (m.frobenius_norm() == 0.0) m(0, 0) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("block-diagonal matrices are perfectly clusterable") {
    Matrix w(4, 4);
    w(0, 0) = 1.0;
    w(0, 1) = -2.0;
    w(1, 1) = 3.0;
    w(2, 2) = 0.5;
    w(3, 3) = 4.0;
    w(2, 3) = -1.0;
    const BiClustering bc = contiguous(2, 4, 4);
    CHECK(clusterlab::clusterability(w, bc).c == 1.0);
    CHECK(clusterlab::clusterability_loss(w, bc) == 0.0);
}

TEST_CASE("uniform matrix sits at the random baseline") {
    Matrix w(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) w(i, j) = 1.0;
    }
    const BiClustering bc = contiguous(2, 4, 4);
    CHECK(clusterlab::clusterability(w, bc).c == 0.5);

    const Matrix grad = clusterlab::clusterability_grad(w, bc);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double expected = bc.same_module(i, j) ? -1.0 / 16.0 : 1.0 / 16.0;
            CHECK(grad(i, j) == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("sparse fixture lands at three sevenths") {
    Matrix w(4, 4);
    w(0, 0) = 1.0;
    w(0, 2) = 2.0;
    w(2, 2) = 1.0;
    w(3, 3) = 1.0;
    const BiClustering bc = contiguous(2, 4, 4);
    const clusterlab::ClusterabilityScore score = clusterlab::clusterability(w, bc);
    CHECK(score.c == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(score.within_mass == 3.0);
    CHECK(score.total_mass == 7.0);
}

TEST_CASE("clusterability matches the oracle on random fixtures") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t rows = 3 + rng.index(6);
        const std::size_t cols = 3 + rng.index(6);
        const int k = 2 + static_cast<int>(rng.index(2));
        if (static_cast<std::size_t>(k) > std::min(rows, cols)) continue;
        const Matrix w = random_integer_matrix(rows, cols, rng);
        const BiClustering bc = contiguous(k, rows, cols);
        CHECK(clusterlab::clusterability(w, bc).c ==
              doctest::Approx(oracles::clusterability(w, bc)).epsilon(1e-14));
    }
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 4 + rng.index(3);
        Matrix w(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) w(i, j) = rng.gaussian();
        }
        const BiClustering bc = contiguous(2, n, n);
        const Matrix analytic = clusterlab::clusterability_grad(w, bc);
        const Matrix fd = oracles::clusterability_loss_fd(w, bc, 1e-6);
        double max_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                max_err = std::max(max_err, std::fabs(analytic(i, j) - fd(i, j)));
            }
        }
        CHECK(max_err / std::max(analytic.max_abs(), 1e-12) < 1e-6);
    }
}

TEST_CASE("clusterability is exactly invariant to doubling and permutation") {
    Rng rng(29);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 4 + rng.index(4);
        const Matrix w = random_integer_matrix(n, n, rng);
        const BiClustering bc = contiguous(2, n, n);
        const double base = clusterlab::clusterability(w, bc).c;

        Matrix scaled = w;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= 2.0;
        }
        CHECK(clusterlab::clusterability(scaled, bc).c == base);

        // Permute rows and carry the row labels along.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        Matrix shuffled(n, n);
        std::vector<int> row_labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            row_labels[i] = bc.row_assign[perm[i]];
            for (std::size_t j = 0; j < n; ++j) shuffled(i, j) = w(perm[i], j);
        }
        const BiClustering moved(2, row_labels, bc.col_assign);
        CHECK(clusterlab::clusterability(shuffled, moved).c == base);
    }
}

TEST_CASE("clusterability rejects degenerate input") {
    const BiClustering bc = contiguous(2, 3, 3);
    CHECK_THROWS_AS(clusterlab::clusterability(Matrix(3, 3), bc), std::domain_error);
    CHECK_THROWS_AS(clusterlab::clusterability(Matrix(4, 3, std::vector<double>(12, 1.0)), bc),
                    std::domain_error);
}

TEST_CASE("community structure on two disjoint edges") {
    Matrix g(4, 4);
    g(0, 1) = g(1, 0) = 1.0;
    g(2, 3) = g(3, 2) = 1.0;
    CHECK(clusterlab::community_structure(g, graph_partition({0, 0, 1, 1})) ==
          doctest::Approx(0.375).epsilon(1e-15));
    CHECK(clusterlab::community_structure(g, graph_partition({0, 1, 0, 1})) ==
          doctest::Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("single-module community structure is one quarter") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        Matrix g(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double v = static_cast<double>(rng.index(4));
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        if (g.frobenius_norm() == 0.0) g(0, 1) = g(1, 0) = 1.0;
        const std::vector<int> one(n, 0);
        CHECK(clusterlab::community_structure(g, graph_partition(one)) ==
              doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("community structure matches the brute-force oracle") {
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.index(4);
        Matrix g(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double v = rng.uniform();
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.index(2));
        labels[0] = 0;
        if (std::count(labels.begin(), labels.end(), 1) == 0) labels[n - 1] = 1;
        CHECK(clusterlab::community_structure(g, graph_partition(labels)) ==
              doctest::Approx(oracles::community_structure(g, labels)).epsilon(1e-12));
    }
}

TEST_CASE("community structure validates its graph") {
    const BiClustering bc = graph_partition({0, 1});
    Matrix asym(2, 2);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(clusterlab::community_structure(asym, bc), std::domain_error);
    Matrix neg(2, 2);
    neg(0, 1) = neg(1, 0) = -1.0;
    CHECK_THROWS_AS(clusterlab::community_structure(neg, bc), std::domain_error);
    CHECK_THROWS_AS(clusterlab::community_structure(Matrix(2, 2), bc), std::domain_error);
}

TEST_CASE("random baseline is the reciprocal of k") {
    CHECK(clusterlab::random_baseline(4) == 0.25);
    CHECK(clusterlab::random_baseline(1) == 1.0);
    CHECK_THROWS_AS(clusterlab::random_baseline(0), std::domain_error);
}

TEST_CASE("cross-module parameters are counted per position") {
    Matrix w(4, 4);
    w(0, 0) = 1.0;  // within
    w(0, 2) = 2.0;  // cross
    w(2, 0) = 3.0;  // cross
    const BiClustering bc = contiguous(2, 4, 4);
    const clusterlab::CrossModuleCount count = clusterlab::cross_module_params(w, bc);
    CHECK(count.count == 8);  // 8 of the 16 positions straddle clusters
    CHECK(count.fraction_of_layer == doctest::Approx(0.5));
}
