// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ckks {

// Deterministic PRNG used everywhere randomness is needed. std:: distributions
// are implementation-defined, so all sampling is done by hand on top of this
// stream to keep results reproducible across compilers and platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) without modulo bias.
    uint64_t next_below(uint64_t bound) {
        uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in the open interval (-1, 1).
    double next_symmetric() {
        for (;;) {
            double u = 2.0 * next_double() - 1.0;
            if (u > -1.0 && u < 1.0) return u;
        }
    }

    // N(0, sigma^2) via Box-Muller, rejection-truncated at +/- 6 sigma.
    double next_gaussian(double sigma) {
        for (;;) {
            double u1 = next_double();
            double u2 = next_double();
            if (u1 <= 0.0) continue;
            double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            double x = sigma * g;
            if (std::abs(x) <= 6.0 * sigma) return x;
        }
    }

private:
    uint64_t state_;
};

// Stable derivation of sub-seeds (per sample, per epoch, per part...) so that
// parallel execution order cannot change what gets sampled.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    Rng r(master ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL) ^
          (c * 0x165667b19e3779f9ULL));
    return r.next_u64();
}

}  // namespace ckks
