// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ckkslab/errors.hpp"

namespace ckks {

using u64 = uint64_t;
using u128 = unsigned __int128;

inline u64 add_mod(u64 a, u64 b, u64 q) {
    u64 s = a + b;
    return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
    return static_cast<u64>((static_cast<u128>(a) * b) % q);
}

// Shoup multiplication: b fixed, b_shoup = floor(b * 2^64 / q). Two 64-bit
// multiplies instead of a 128-bit division; requires a < q and q < 2^63.
inline u64 mul_mod_shoup(u64 a, u64 b, u64 b_shoup, u64 q) {
    u64 hi = static_cast<u64>((static_cast<u128>(a) * b_shoup) >> 64);
    u64 r = a * b - hi * q;
    return r >= q ? r - q : r;
}

inline u64 shoup_precompute(u64 b, u64 q) {
    return static_cast<u64>((static_cast<u128>(b) << 64) / q);
}

u64 pow_mod(u64 base, u64 exp, u64 q);

// Miller-Rabin. With rounds == 0 uses the deterministic 64-bit witness set;
// otherwise runs `rounds` random-base rounds on top of it.
bool is_prime(u64 n, int rounds = 0);

// One RNS prime together with the constants the NTT needs.
struct PrimeModulus {
    u64 value = 0;
    int bit_length = 0;
    u64 root_2n = 0;      // primitive 2N-th root of unity mod value
    u64 root_2n_inv = 0;  // its inverse

    u64 inv_mod(u64 a) const { return pow_mod(a % value, value - 2, value); }
};

// Ordered list of RNS primes. The ciphertext ("data") chain is the prefix
// excluding the final prime, which is reserved for key switching; a
// single-prime chain has no key prime and supports no key-switched ops.
struct ModulusChain {
    std::vector<PrimeModulus> primes;
    std::vector<int> bit_sizes;
    size_t degree = 0;  // ring degree N the primes were generated for

    size_t size() const { return primes.size(); }
    size_t data_prime_count() const { return primes.size() == 1 ? 1 : primes.size() - 1; }
    bool has_key_prime() const { return primes.size() > 1; }
    const PrimeModulus& key_prime() const { return primes.back(); }
    // Highest ciphertext level: fresh ciphertexts live at this level.
    size_t top_data_level() const { return data_prime_count() - 1; }

    int total_bits() const {
        int total = 0;
        for (int b : bit_sizes) total += b;
        return total;
    }

    // Product of the active primes (levels 0..level) as a double.
    double modulus_product(size_t level) const;
};

// Finds distinct NTT-friendly primes (p = 1 mod 2N) of exactly the requested
// bit lengths, scanning downward from 2^bits - 1 in steps of 2N so the result
// is deterministic.
ModulusChain make_modulus_chain(const std::vector<int>& bit_sizes, size_t degree);

}  // namespace ckks
