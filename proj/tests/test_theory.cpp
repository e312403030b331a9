#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/theory.hpp"

using clusterlab::BigCount;
using clusterlab::ModularPartition;

namespace {

// Long-double re-derivation of the capacity: largest m with ln(m) < T.
// Good enough as an independent check away from representational hairlines.
long long capacity_oracle(int n, double eps) {
    const long double t = static_cast<long double>(n) * eps * eps / 8.0L;
    long long m = static_cast<long long>(std::floor(std::exp(t)));
    while (m > 1 && std::log(static_cast<long double>(m)) >= t) --m;
    while (std::log(static_cast<long double>(m + 1)) < t) ++m;
    return m;
}

}  // namespace

TEST_CASE("dense polytope bound multiplies layer contributions") {
    const BigCount b = clusterlab::polytope_bound_dense({2, 3});
    CHECK(b.to_decimal() == "32");
    CHECK(b.log2 == doctest::Approx(5.0));

    const BigCount big = clusterlab::polytope_bound_dense({64, 64});
    CHECK(big.log2 == doctest::Approx(128.0));
    CHECK(big.to_decimal() == "340282366920938463463374607431768211456");

    CHECK_THROWS_AS(clusterlab::polytope_bound_dense({}), std::domain_error);
    CHECK_THROWS_AS(clusterlab::polytope_bound_dense({4, 0}), std::domain_error);
}

TEST_CASE("modular pair count beats the dense count") {
    ModularPartition part;
    part.output_widths = {2, 2};
    const BigCount modular = clusterlab::polytope_pair_count_modular(4, part);
    const BigCount dense = clusterlab::polytope_pair_count_dense(4, 4);
    CHECK(modular.to_decimal() == "128");
    CHECK(dense.to_decimal() == "256");
    CHECK(modular.value < dense.value);

    // More, smaller modules keep shrinking the count.
    ModularPartition quarters;
    quarters.output_widths = {16, 16, 16, 16};
    ModularPartition halves;
    halves.output_widths = {32, 32};
    CHECK(clusterlab::polytope_pair_count_modular(64, quarters).value <
          clusterlab::polytope_pair_count_modular(64, halves).value);
}

TEST_CASE("split-input pair count needs and uses input widths") {
    ModularPartition part;
    part.output_widths = {2, 2};
    CHECK_THROWS_AS(clusterlab::polytope_pair_count_split_inputs(part), std::domain_error);
    part.input_widths = std::vector<int>{2, 2};
    CHECK(clusterlab::polytope_pair_count_split_inputs(part).to_decimal() == "32");
    part.input_widths = std::vector<int>{2, 2, 2};
    CHECK_THROWS_AS(part.validate(), std::domain_error);
}

TEST_CASE("big counts carry an accurate log2") {
    const BigCount b = clusterlab::polytope_pair_count_dense(10, 3);
    CHECK(b.to_decimal() == "8192");
    CHECK(b.log2 == doctest::Approx(13.0));
}

TEST_CASE("jl capacity reference value") {
    const BigCount cap = clusterlab::jl_capacity(100, 0.5);
    CHECK(cap.to_decimal() == "22");
    // Defining inequality: holds at 22, fails at 23.
    const double t = 100.0 * 0.25 / 8.0;
    CHECK(std::log(22.0) < t);
    CHECK(std::log(23.0) >= t);
}

TEST_CASE("jl capacity agrees with the long-double oracle") {
    const int ns[] = {1, 8, 33, 80, 100, 144, 200, 301};
    const double epss[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    for (int n : ns) {
        for (double eps : epss) {
            const BigCount cap = clusterlab::jl_capacity(n, eps);
            CHECK(cap.to_decimal() == std::to_string(capacity_oracle(n, eps)));
        }
    }
}

TEST_CASE("jl capacity validates its domain") {
    CHECK_THROWS_AS(clusterlab::jl_capacity(0, 0.5), std::domain_error);
    CHECK_THROWS_AS(clusterlab::jl_capacity(10, 0.0), std::domain_error);
    CHECK_THROWS_AS(clusterlab::jl_capacity(10, 1.0), std::domain_error);
    // Threshold beyond the supported range.
    CHECK_THROWS_AS(clusterlab::jl_capacity(1 << 18, 0.9), std::domain_error);
}

TEST_CASE("jl capacity handles large exact thresholds") {
    // T = 1000 * 0.64 / 8 = 80; e^80 is a 35-digit integer.
    const BigCount cap = clusterlab::jl_capacity(1000, 0.8);
    CHECK(cap.to_decimal().size() == 35);
    CHECK(cap.log2 == doctest::Approx(80.0 / std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("modular capacity comparison uses log-sum-exp") {
    const clusterlab::CapacityComparison cmp =
        clusterlab::modular_capacity_comparison({16, 16, 16, 16});
    CHECK(cmp.dense_log == doctest::Approx(64.0));
    // ln(4 e^16) = 16 + ln 4.
    CHECK(cmp.modular_log == doctest::Approx(16.0 + std::log(4.0)).epsilon(1e-12));
    CHECK(cmp.gap == doctest::Approx(cmp.dense_log - cmp.modular_log));
    CHECK(cmp.gap > 0.0);

    // Unequal parts: the largest dominates the log-sum-exp.
    const clusterlab::CapacityComparison lop =
        clusterlab::modular_capacity_comparison({30, 2});
    CHECK(lop.modular_log == doctest::Approx(30.0 + std::log1p(std::exp(-28.0))).epsilon(1e-12));
    CHECK_THROWS_AS(clusterlab::modular_capacity_comparison({}), std::domain_error);
}

TEST_CASE("capacity gap grows with the number of modules") {
    double previous = 0.0;
    for (int k = 2; k <= 8; k *= 2) {
        std::vector<int> parts(k, 64 / k);
        const clusterlab::CapacityComparison cmp =
            clusterlab::modular_capacity_comparison(parts);
        CHECK(cmp.gap > previous);
        previous = cmp.gap;
    }
}
