// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/primes.hpp"

#include <algorithm>

#include "ckkslab/rng.hpp"

namespace ckks {

u64 pow_mod(u64 base, u64 exp, u64 q) {
    u64 result = 1;
    base %= q;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return result;
}

namespace {

bool miller_rabin_witness(u64 n, u64 a, u64 d, int r) {
    a %= n;
    if (a == 0) return true;
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_prime(u64 n, int rounds) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // Deterministic for all 64-bit integers with this witness set.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (!miller_rabin_witness(n, a, d, r)) return false;
    }
    if (rounds > 0) {
        Rng rng(n ^ 0xabcdef1234567890ULL);
        for (int i = 0; i < rounds; ++i) {
            u64 a = 2 + rng.next_below(n - 3);
            if (!miller_rabin_witness(n, a, d, r)) return false;
        }
    }
    return true;
}

namespace {

// Primitive 2N-th root of unity mod p, p = 1 (mod 2N). Deterministic: try
// small candidate generators in order and verify psi^N = -1.
u64 find_root_2n(u64 p, size_t degree) {
    u64 two_n = 2 * static_cast<u64>(degree);
    u64 quotient = (p - 1) / two_n;
    for (u64 g = 2;; ++g) {
        u64 psi = pow_mod(g, quotient, p);
        if (psi == 0 || psi == 1) continue;
        if (pow_mod(psi, degree, p) == p - 1) return psi;
    }
}

bool power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

double ModulusChain::modulus_product(size_t level) const {
    double q = 1.0;
    for (size_t i = 0; i <= level && i < primes.size(); ++i) {
        q *= static_cast<double>(primes[i].value);
    }
    return q;
}

ModulusChain make_modulus_chain(const std::vector<int>& bit_sizes, size_t degree) {
    if (bit_sizes.empty()) {
        throw_error(ErrorCode::InvalidBitSize, "empty bit-size list");
    }
    static const size_t kDegrees[] = {1024, 2048, 4096, 8192, 16384, 32768};
    if (std::find(std::begin(kDegrees), std::end(kDegrees), degree) == std::end(kDegrees)) {
        throw_error(ErrorCode::InvalidDegree, "degree must be a power of two in [1024, 32768]");
    }
    for (int b : bit_sizes) {
        if (b < 20 || b > 60) {
            throw_error(ErrorCode::InvalidBitSize, "bit size " + std::to_string(b) +
                                                       " outside [20, 60]");
        }
    }
    (void)power_of_two(degree);

    ModulusChain chain;
    chain.bit_sizes = bit_sizes;
    chain.degree = degree;
    u64 step = 2 * static_cast<u64>(degree);

    std::vector<u64> used;
    for (int bits : bit_sizes) {
        u64 upper = (1ULL << bits) - 1;
        u64 lower = 1ULL << (bits - 1);
        // Largest candidate <= upper with candidate = 1 (mod 2N).
        u64 candidate = upper - ((upper - 1) % step);
        bool found = false;
        while (candidate > lower) {
            if (std::find(used.begin(), used.end(), candidate) == used.end() &&
                is_prime(candidate)) {
                found = true;
                break;
            }
            candidate -= step;
        }
        if (!found) {
            throw_error(ErrorCode::NoPrimeFound,
                        "no NTT-friendly prime of " + std::to_string(bits) + " bits for N=" +
                            std::to_string(degree));
        }
        used.push_back(candidate);
        PrimeModulus prime;
        prime.value = candidate;
        prime.bit_length = bits;
        prime.root_2n = find_root_2n(candidate, degree);
        prime.root_2n_inv = prime.inv_mod(prime.root_2n);
        chain.primes.push_back(prime);
    }
    return chain;
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoPrimeFound: return "NoPrimeFound";
        case ErrorCode::InvalidBitSize: return "InvalidBitSize";
        case ErrorCode::InvalidDegree: return "InvalidDegree";
        case ErrorCode::FormMismatch: return "FormMismatch";
        case ErrorCode::LevelMismatch: return "LevelMismatch";
        case ErrorCode::LevelExhausted: return "LevelExhausted";
        case ErrorCode::ScaleMismatch: return "ScaleMismatch";
        case ErrorCode::ScaleOverflow: return "ScaleOverflow";
        case ErrorCode::TooManySlots: return "TooManySlots";
        case ErrorCode::MissingGaloisKey: return "MissingGaloisKey";
        case ErrorCode::MissingRelinKey: return "MissingRelinKey";
        case ErrorCode::DegreeUnsupported: return "DegreeUnsupported";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::ShadowUnavailable: return "ShadowUnavailable";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ConstantTarget: return "ConstantTarget";
        case ErrorCode::ConstantColumn: return "ConstantColumn";
        case ErrorCode::EmptyTestSet: return "EmptyTestSet";
        case ErrorCode::NoAccumulatedGradients: return "NoAccumulatedGradients";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace ckks
