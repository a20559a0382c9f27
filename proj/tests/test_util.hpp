// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "ckkslab/rns_poly.hpp"

namespace ckks::test {

// Ring over hand-picked small NTT-friendly primes, for oracle-sized cases that
// make_modulus_chain's [20, 60]-bit policy would reject.
inline std::shared_ptr<const Ring> tiny_ring(const std::vector<u64>& primes, size_t degree) {
    auto ring = std::make_shared<Ring>();
    ring->chain.degree = degree;
    for (u64 p : primes) {
        PrimeModulus prime;
        prime.value = p;
        int bits = 0;
        for (u64 v = p; v > 0; v >>= 1) ++bits;
        prime.bit_length = bits;
        u64 quotient = (p - 1) / (2 * degree);
        for (u64 g = 2;; ++g) {
            u64 psi = pow_mod(g, quotient, p);
            if (psi == 0 || psi == 1) continue;
            if (pow_mod(psi, degree, p) == p - 1) {
                prime.root_2n = psi;
                break;
            }
        }
        prime.root_2n_inv = prime.inv_mod(prime.root_2n);
        ring->chain.primes.push_back(prime);
        ring->chain.bit_sizes.push_back(bits);
        ring->ntt.emplace_back(prime, degree);
    }
    return ring;
}

// O(N^2) negacyclic convolution mod q: the independent oracle for poly_mul.
inline std::vector<u64> schoolbook_negacyclic(const std::vector<u64>& a, const std::vector<u64>& b,
                                              u64 q) {
    size_t n = a.size();
    std::vector<u64> out(n, 0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            u64 prod = mul_mod(a[i], b[j], q);
            size_t k = i + j;
            if (k < n) {
                out[k] = add_mod(out[k], prod, q);
            } else {
                out[k - n] = sub_mod(out[k - n], prod, q);  // X^N = -1
            }
        }
    }
    return out;
}

// Schoolbook evaluation of p at psi^(2j+1): the oracle for the forward NTT.
inline std::vector<u64> naive_negacyclic_dft(const std::vector<u64>& a, u64 psi, u64 q) {
    size_t n = a.size();
    std::vector<u64> out(n, 0);
    for (size_t j = 0; j < n; ++j) {
        u64 point = pow_mod(psi, 2 * j + 1, q);
        u64 acc = 0;
        u64 power = 1;
        for (size_t i = 0; i < n; ++i) {
            acc = add_mod(acc, mul_mod(a[i], power, q), q);
            power = mul_mod(power, point, q);
        }
        out[j] = acc;
    }
    return out;
}

}  // namespace ckks::test
