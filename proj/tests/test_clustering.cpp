#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clusterlab/biclustering.hpp"
#include "clusterlab/bsgc.hpp"
#include "clusterlab/matrix.hpp"
#include "clusterlab/metrics.hpp"
#include "clusterlab/rng.hpp"
#include "oracles.hpp"

using clusterlab::BiClustering;
using clusterlab::Matrix;
using clusterlab::Rng;

namespace {

// Planted bipartite block structure: strong diagonal blocks plus uniform
// off-block noise of the given relative magnitude.
Matrix planted_blocks(std::size_t n, int k, double noise, std::uint64_t seed) {
    Rng rng(seed);
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const bool same = i * static_cast<std::size_t>(k) / n ==
                              j * static_cast<std::size_t>(k) / n;
            w(i, j) = same ? 1.0 + 0.2 * rng.uniform() : noise * rng.uniform();
        }
    }
    return w;
}

}  // namespace

TEST_CASE("biclustering validation") {
    CHECK_THROWS_AS(BiClustering(0, {0}, {0}), std::domain_error);
    CHECK_THROWS_AS(BiClustering(2, {0, 2}, {0, 1}), std::domain_error);
    CHECK_THROWS_AS(BiClustering(2, {0, 0}, {0, 1}), std::domain_error);  // cluster 1 empty rows
    const BiClustering ok(2, {0, 1}, {1, 0});
    CHECK(ok.same_module(0, 1));
    CHECK_FALSE(ok.same_module(0, 0));
}

TEST_CASE("clustering equivalence is relabeling-invariant") {
    const BiClustering a(2, {0, 0, 1, 1}, {0, 1, 1, 0});
    const BiClustering b(2, {1, 1, 0, 0}, {1, 0, 0, 1});
    const BiClustering c(2, {0, 1, 0, 1}, {0, 1, 1, 0});
    CHECK(clusterlab::equivalent_clusterings(a, b));
    CHECK_FALSE(clusterlab::equivalent_clusterings(a, c));
    // Rows and columns must relabel with the same bijection.
    const BiClustering d(2, {0, 0, 1, 1}, {1, 0, 0, 1});
    CHECK_FALSE(clusterlab::equivalent_clusterings(a, d));
}

TEST_CASE("contiguous clusters split evenly") {
    const BiClustering bc = clusterlab::contiguous_clusters(8, 8, 4);
    CHECK(bc.row_assign == std::vector<int>{0, 0, 1, 1, 2, 2, 3, 3});
    CHECK(bc.col_assign == bc.row_assign);
    const BiClustering uneven = clusterlab::contiguous_clusters(5, 5, 2);
    CHECK(uneven.row_assign == std::vector<int>{0, 0, 0, 1, 1});
    CHECK_THROWS_AS(clusterlab::contiguous_clusters(3, 8, 4), std::domain_error);
}

TEST_CASE("weight similarity is the absolute value") {
    const Matrix w(2, 2, {1.0, -2.0, 0.0, -0.5});
    const Matrix s = clusterlab::weight_similarity(w);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == 2.0);
    CHECK(s(1, 0) == 0.0);
    CHECK(s(1, 1) == 0.5);
}

TEST_CASE("gradient trace accumulates normalized magnitudes") {
    clusterlab::GradTrace trace(2, 2);
    clusterlab::record_gradient_step(trace, Matrix(2, 2, {3.0, 0.0, 0.0, 4.0}));
    CHECK(trace.step_count == 1);
    clusterlab::record_gradient_step(trace, Matrix(2, 2));  // zero gradient: skipped
    CHECK(trace.step_count == 1);
    clusterlab::record_gradient_step(trace, Matrix(2, 2, {0.0, -5.0, 0.0, 0.0}));
    const Matrix sim = clusterlab::gradient_similarity(trace);
    CHECK(sim(0, 0) == doctest::Approx(0.3));   // (3/5 + 0) / 2
    CHECK(sim(0, 1) == doctest::Approx(0.5));   // (0 + 5/5) / 2
    CHECK(sim(1, 1) == doctest::Approx(0.4));   // (4/5 + 0) / 2
    CHECK_THROWS_AS(clusterlab::record_gradient_step(trace, Matrix(3, 2)), std::domain_error);
    const clusterlab::GradTrace empty(2, 2);
    CHECK_THROWS_AS(clusterlab::gradient_similarity(empty), std::domain_error);
}

TEST_CASE("bsgc recovers a clean two-block structure") {
    const Matrix w = planted_blocks(8, 2, 0.0, 5);
    const BiClustering bc = clusterlab::bsgc(clusterlab::weight_similarity(w), 2, 0);
    CHECK(clusterlab::equivalent_clusterings(bc, clusterlab::contiguous_clusters(8, 8, 2)));
    CHECK(clusterlab::clusterability(w, bc).c == doctest::Approx(1.0));
}

TEST_CASE("bsgc tolerates off-block noise") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix w = planted_blocks(12, 4, 0.05, 50 + seed);
        const BiClustering bc = clusterlab::bsgc(clusterlab::weight_similarity(w), 4, seed);
        CHECK(clusterlab::equivalent_clusterings(bc, clusterlab::contiguous_clusters(12, 12, 4)));
        CHECK(clusterlab::clusterability(w, bc).c > 0.95);
    }
}

TEST_CASE("bsgc two-block result matches the exhaustive optimum") {
    const Matrix w = planted_blocks(8, 2, 0.05, 99);
    const BiClustering bc = clusterlab::bsgc(clusterlab::weight_similarity(w), 2, 3);
    const double found = clusterlab::clusterability(w, bc).c;
    CHECK(found >= oracles::best_two_cluster_c(w) - 1e-12);
}

TEST_CASE("bsgc is deterministic in the seed") {
    const Matrix w = planted_blocks(10, 2, 0.3, 7);
    const BiClustering a = clusterlab::bsgc(clusterlab::weight_similarity(w), 2, 123);
    const BiClustering b = clusterlab::bsgc(clusterlab::weight_similarity(w), 2, 123);
    CHECK(a.row_assign == b.row_assign);
    CHECK(a.col_assign == b.col_assign);
}

TEST_CASE("bsgc pairs row and column clusters by shared mass") {
    // Anti-diagonal blocks: rows of the first half connect to the second
    // half of the columns. Alignment must put them in the same module.
    Matrix w(6, 6);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 3; j < 6; ++j) w(i, j) = 1.0 + 0.01 * static_cast<double>(i + j);
    }
    for (std::size_t i = 3; i < 6; ++i) {
        for (std::size_t j = 0; j < 3; ++j) w(i, j) = 1.0 + 0.01 * static_cast<double>(i * j);
    }
    const BiClustering bc = clusterlab::bsgc(clusterlab::weight_similarity(w), 2, 1);
    CHECK(clusterlab::clusterability(w, bc).c == doctest::Approx(1.0));
    CHECK(bc.row_assign[0] == bc.col_assign[4]);
    CHECK(bc.row_assign[4] == bc.col_assign[0]);
}

TEST_CASE("bsgc rejects bad input") {
    const Matrix w = planted_blocks(6, 2, 0.2, 1);
    CHECK_THROWS_AS(clusterlab::bsgc(clusterlab::weight_similarity(w), 0, 0),
                    std::domain_error);
    CHECK_THROWS_AS(clusterlab::bsgc(clusterlab::weight_similarity(w), 7, 0),
                    std::domain_error);
    Matrix neg(3, 3, std::vector<double>(9, 1.0));
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(clusterlab::bsgc(neg, 2, 0), std::domain_error);
    Matrix dead(3, 3, std::vector<double>(9, 1.0));
    dead(1, 0) = dead(1, 1) = dead(1, 2) = 0.0;
    CHECK_THROWS_WITH_AS(clusterlab::bsgc(dead, 2, 0),
                         doctest::Contains("input neuron 1"), std::domain_error);
}

TEST_CASE("align keeps already-aligned labels") {
    const Matrix w = planted_blocks(8, 2, 0.0, 9);
    const BiClustering bc = clusterlab::contiguous_clusters(8, 8, 2);
    const BiClustering aligned =
        clusterlab::align_biclusters(w, bc.row_assign, bc.col_assign, 2);
    CHECK(aligned.row_assign == bc.row_assign);
    CHECK(aligned.col_assign == bc.col_assign);
}

TEST_CASE("align repairs swapped column labels") {
    const Matrix w = planted_blocks(8, 2, 0.0, 9);
    const BiClustering bc = clusterlab::contiguous_clusters(8, 8, 2);
    std::vector<int> swapped = bc.col_assign;
    for (int& v : swapped) v = 1 - v;
    const BiClustering aligned = clusterlab::align_biclusters(w, bc.row_assign, swapped, 2);
    CHECK(aligned.col_assign == bc.col_assign);
    CHECK(clusterlab::clusterability(w, aligned).c == doctest::Approx(1.0));
    CHECK_THROWS_AS(clusterlab::align_biclusters(w, bc.row_assign, bc.col_assign, 9),
                    std::domain_error);
}
