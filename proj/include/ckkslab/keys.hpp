// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "ckkslab/context.hpp"

namespace ckks {

struct SecretKey {
    RnsPolynomial s_ntt;     // ternary secret, all chain primes, NTT form
    RnsPolynomial s_coeff;   // coefficient form (automorphisms at keygen)
    RnsPolynomial s_sq_ntt;  // s^2, for decrypting non-relinearized ciphertexts
    uint64_t seed = 0;
};

struct PublicKey {
    // (b, a) with b = -a s + e over the data primes, NTT form.
    RnsPolynomial b;
    RnsPolynomial a;
};

// One key-switching key: for every data prime j a pair (b_j, a_j) over the
// full chain (data primes + key prime P), with b_j = -a_j s + e_j + P g_j T,
// g_j the j-th RNS unit vector and T the switched-in secret factor.
struct KswitchKey {
    std::vector<RnsPolynomial> b;
    std::vector<RnsPolynomial> a;
};

struct RelinKey {
    KswitchKey key;  // T = s^2
};

struct GaloisKeys {
    // Keyed by galois element; steps maps a rotation step to its element.
    std::map<uint64_t, KswitchKey> keys;
    std::map<int64_t, uint64_t> steps;

    bool has_step(int64_t step) const { return steps.count(step) != 0; }
};

struct KeyPair {
    SecretKey secret;
    PublicKey public_key;
};

KeyPair keygen(const CkksContext& ctx, uint64_t seed);
RelinKey gen_relin_key(const SecretKey& sk, const CkksContext& ctx);
GaloisKeys gen_galois_keys(const SecretKey& sk, const std::vector<int64_t>& steps,
                           const CkksContext& ctx);

// Applies X -> X^element to a coefficient-form polynomial.
RnsPolynomial apply_automorphism(const RnsPolynomial& p, uint64_t element);

// Key-switch core: folds a single polynomial c (NTT form, level ell) that
// multiplies the key's secret factor T into a (d0, d1) pair under s, dividing
// by the key prime with rounding. Returns NTT-form parts at level ell.
std::pair<RnsPolynomial, RnsPolynomial> switch_key(const RnsPolynomial& c, const KswitchKey& key,
                                                   const CkksContext& ctx);

}  // namespace ckks
