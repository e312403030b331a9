#include "clusterlab/theory.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace clusterlab {

BigCount make_big_count(mpz_class value) {
    if (value <= 0) throw std::domain_error("BigCount: counts must be positive");
    BigCount out;
    long exp = 0;
    const double d = mpz_get_d_2exp(&exp, value.get_mpz_t());
    out.log2 = static_cast<double>(exp) + std::log2(d);
    out.value = std::move(value);
    return out;
}

namespace {

mpz_class pow2(long n) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(n));
    return r;
}

}  // namespace

int ModularPartition::output_total() const {
    int total = 0;
    for (int w : output_widths) total += w;
    return total;
}

void ModularPartition::validate() const {
    if (output_widths.empty()) {
        throw std::domain_error("ModularPartition: no output sub-widths");
    }
    for (int w : output_widths) {
        if (w < 1) throw std::domain_error("ModularPartition: non-positive output sub-width");
    }
    if (input_widths) {
        if (input_widths->size() != output_widths.size()) {
            throw std::domain_error("ModularPartition: " + std::to_string(input_widths->size()) +
                                    " input parts for " + std::to_string(output_widths.size()) +
                                    " output parts");
        }
        for (int w : *input_widths) {
            if (w < 1) throw std::domain_error("ModularPartition: non-positive input sub-width");
        }
    }
}

BigCount polytope_bound_dense(const std::vector<int>& hidden_widths) {
    if (hidden_widths.empty()) {
        throw std::domain_error("polytope_bound_dense: empty width list");
    }
    long total = 0;
    for (int w : hidden_widths) {
        if (w < 1) throw std::domain_error("polytope_bound_dense: non-positive width");
        total += w;
    }
    return make_big_count(pow2(total));
}

BigCount polytope_pair_count_dense(int n_prev, int n_out) {
    if (n_prev < 1 || n_out < 1) {
        throw std::domain_error("polytope_pair_count_dense: widths must be positive");
    }
    return make_big_count(pow2(static_cast<long>(n_prev) + n_out));
}

BigCount polytope_pair_count_modular(int n_prev, const ModularPartition& partition) {
    if (n_prev < 1) {
        throw std::domain_error("polytope_pair_count_modular: n_prev must be positive");
    }
    partition.validate();
    mpz_class sum = 0;
    for (int w : partition.output_widths) {
        sum += pow2(static_cast<long>(n_prev) + w);
    }
    return make_big_count(std::move(sum));
}

BigCount polytope_pair_count_split_inputs(const ModularPartition& partition) {
    partition.validate();
    if (!partition.input_widths) {
        throw std::domain_error("polytope_pair_count_split_inputs: partition has no "
                                "input sub-widths");
    }
    mpz_class sum = 0;
    for (std::size_t i = 0; i < partition.output_widths.size(); ++i) {
        sum += pow2(static_cast<long>((*partition.input_widths)[i]) +
                    partition.output_widths[i]);
    }
    return make_big_count(std::move(sum));
}

namespace {

// Wraps a non-negative mpfr value in RAII.
struct Real {
    mpfr_t x;
    explicit Real(mpfr_prec_t prec) { mpfr_init2(x, prec); }
    ~Real() { mpfr_clear(x); }
    Real(const Real&) = delete;
    Real& operator=(const Real&) = delete;
};

// n*eps^2/8 is an exact binary rational: eps has a 53-bit mantissa, so 160
// bits hold eps^2 * n / 8 with no rounding at all.
constexpr mpfr_prec_t kThresholdPrec = 160;
constexpr mpfr_prec_t kPrecCap = mpfr_prec_t{1} << 20;

void set_threshold(mpfr_t out, int n, double eps) {
    mpfr_set_d(out, eps, MPFR_RNDN);
    mpfr_sqr(out, out, MPFR_RNDN);
    mpfr_mul_si(out, out, n, MPFR_RNDN);
    mpfr_div_ui(out, out, 8, MPFR_RNDN);
}

// -1 or +1 for ln(m) < or > threshold, decided exactly. ln(m) is irrational
// for m >= 2 while the threshold is rational, so bracketing ln(m) between
// round-down and round-up evaluations at growing precision always separates
// the two sides.
int compare_log_to_threshold(const mpz_class& m, int n, double eps) {
    if (m == 1) {
        // ln 1 = 0 < n*eps^2/8 whenever n >= 1 and eps > 0
        return -1;
    }
    Real threshold(kThresholdPrec);
    set_threshold(threshold.x, n, eps);
    const auto m_bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(m.get_mpz_t(), 2));
    Real mr(std::max<mpfr_prec_t>(64, m_bits));  // holds m exactly
    mpfr_set_z(mr.x, m.get_mpz_t(), MPFR_RNDN);
    for (mpfr_prec_t prec = 128;; prec *= 2) {
        Real lo(prec), hi(prec);
        mpfr_log(lo.x, mr.x, MPFR_RNDD);
        mpfr_log(hi.x, mr.x, MPFR_RNDU);
        if (mpfr_cmp(hi.x, threshold.x) < 0) return -1;
        if (mpfr_cmp(lo.x, threshold.x) > 0) return 1;
        if (prec > kPrecCap) {
            throw std::runtime_error("jl_capacity: comparison did not separate at 2^20 bits");
        }
    }
}

}  // namespace

BigCount jl_capacity(int n, double eps) {
    if (n < 1) throw std::domain_error("jl_capacity: n must be positive");
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("jl_capacity: eps must lie in (0,1)");
    }
    const double threshold = static_cast<double>(n) * eps * eps / 8.0;
    if (threshold > 4096.0) {
        throw std::domain_error("jl_capacity: threshold " + std::to_string(threshold) +
                                " beyond the supported range (4096)");
    }

    // candidate = floor(e^threshold), bracketed until the floor is certain
    Real t(kThresholdPrec);
    set_threshold(t.x, n, eps);
    mpz_class candidate;
    for (mpfr_prec_t prec = std::max<mpfr_prec_t>(
             128, static_cast<mpfr_prec_t>(1.5 * threshold) + 64);
         ; prec *= 2) {
        Real lo(prec), hi(prec);
        mpfr_exp(lo.x, t.x, MPFR_RNDD);
        mpfr_exp(hi.x, t.x, MPFR_RNDU);
        mpfr_floor(lo.x, lo.x);
        mpfr_floor(hi.x, hi.x);
        if (mpfr_cmp(lo.x, hi.x) == 0) {
            mpfr_get_z(candidate.get_mpz_t(), lo.x, MPFR_RNDN);
            break;
        }
        if (prec > kPrecCap) {
            throw std::runtime_error("jl_capacity: floor did not stabilize at 2^20 bits");
        }
    }
    if (candidate < 1) candidate = 1;

    // verify at the candidate and its neighbors; the loop moves at most a
    // step or two when the floating candidate sat on the wrong side
    while (candidate > 1 && compare_log_to_threshold(candidate, n, eps) >= 0) {
        --candidate;
    }
    while (compare_log_to_threshold(candidate + 1, n, eps) < 0) {
        ++candidate;
    }
    return make_big_count(std::move(candidate));
}

CapacityComparison modular_capacity_comparison(const std::vector<int>& partition) {
    if (partition.empty()) {
        throw std::domain_error("modular_capacity_comparison: empty partition");
    }
    int total = 0;
    int widest = partition.front();
    for (int w : partition) {
        if (w < 1) {
            throw std::domain_error("modular_capacity_comparison: non-positive sub-width");
        }
        total += w;
        widest = std::max(widest, w);
    }
    double sum = 0.0;
    for (int w : partition) sum += std::exp(static_cast<double>(w - widest));
    CapacityComparison out;
    out.modular_log = static_cast<double>(widest) + std::log(sum);
    out.dense_log = static_cast<double>(total);
    out.gap = out.dense_log - out.modular_log;
    return out;
}

}  // namespace clusterlab
