#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace clusterlab {

// splitmix64 finalizer; derives independent stream seeds from (seed, salt)
// so that consumers (init, shuffling, clustering) never share a stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded RNG. The mt19937_64 engine is bit-exact per the standard; the
// draw helpers are hand-rolled because the <random> distributions are
// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform index in [0, n), rejection-sampled to remove modulo bias
    std::size_t index(std::size_t n) {
        assert(n > 0);
        const std::uint64_t nn = n;
        const std::uint64_t min = (0 - nn) % nn;  // 2^64 mod n
        std::uint64_t r = eng_();
        while (r < min) r = eng_();
        return static_cast<std::size_t>(r % nn);
    }

    // standard normal via Box-Muller; caches the paired deviate
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace clusterlab
