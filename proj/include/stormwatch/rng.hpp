#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stormwatch {

// Seeded generator with hand-rolled samplers so that a given seed produces
// the same stream on every build (std:: distributions are
// implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Knuth product-of-uniforms; fine for the small rates used here.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    // Poisson conditioned on X <= bound, by rejection.
    int truncated_poisson(double lambda, int bound) {
        if (lambda <= 0.0 || bound <= 0) return 0;
        for (;;) {
            int x = poisson(lambda);
            if (x <= bound) return x;
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace stormwatch
