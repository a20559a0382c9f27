// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ckkslab/ntt.hpp"
#include "ckkslab/primes.hpp"

namespace ckks {

// Modulus chain plus the NTT machinery for every prime in it. Immutable after
// construction and shared by all polynomials built on it.
struct Ring {
    ModulusChain chain;
    std::vector<NttTable> ntt;

    static std::shared_ptr<const Ring> create(const std::vector<int>& bit_sizes, size_t degree);

    size_t degree() const { return chain.degree; }
    const PrimeModulus& prime(size_t i) const { return chain.primes[i]; }
};

enum class PolyForm { Coeff, Ntt };

// Ring element with one residue row per active prime (a prefix of the chain).
struct RnsPolynomial {
    std::shared_ptr<const Ring> ring;
    PolyForm form = PolyForm::Coeff;
    std::vector<std::vector<u64>> rows;

    size_t degree() const { return ring ? ring->degree() : 0; }
    size_t level() const { return rows.size() - 1; }
    size_t prime_count() const { return rows.size(); }

    static RnsPolynomial zero(std::shared_ptr<const Ring> ring, size_t num_primes,
                              PolyForm form = PolyForm::Coeff);

    // Drops residue rows beyond `num_primes` (RNS modulus switch).
    void truncate(size_t num_primes);

    bool operator==(const RnsPolynomial& other) const {
        return form == other.form && rows == other.rows;
    }
};

enum class NttDirection { Forward, Inverse };

// In-place transform; errors with FormMismatch if already in the target form.
void ntt_transform(RnsPolynomial& p, NttDirection direction);
RnsPolynomial to_form(const RnsPolynomial& p, PolyForm form);

RnsPolynomial poly_add(const RnsPolynomial& a, const RnsPolynomial& b);
RnsPolynomial poly_sub(const RnsPolynomial& a, const RnsPolynomial& b);
RnsPolynomial poly_negate(const RnsPolynomial& a);
// Pointwise product in the NTT domain (negacyclic convolution in coefficient
// domain). Operands in coefficient form are transformed on the fly.
RnsPolynomial poly_mul(const RnsPolynomial& a, const RnsPolynomial& b);

void poly_add_inplace(RnsPolynomial& a, const RnsPolynomial& b);
void poly_sub_inplace(RnsPolynomial& a, const RnsPolynomial& b);
void poly_mul_accumulate(RnsPolynomial& acc, const RnsPolynomial& a, const RnsPolynomial& b);

// Coefficients in {-1, 0, 1}, uniform, identical integer value in every row.
RnsPolynomial sample_ternary(std::shared_ptr<const Ring> ring, size_t num_primes, uint64_t seed);
// Integer-rounded N(0, sigma^2), truncated at +/- 6 sigma.
RnsPolynomial sample_gaussian(std::shared_ptr<const Ring> ring, size_t num_primes, double sigma,
                              uint64_t seed);
// Independent uniform residues per prime (uniform over R_Q by CRT).
RnsPolynomial sample_uniform(std::shared_ptr<const Ring> ring, size_t num_primes, uint64_t seed);

// Arbitrary-precision signed integer, wide enough for any chain product here.
struct SignedBig {
    bool negative = false;
    std::vector<u64> limbs;  // little-endian magnitude, no trailing zeros

    double to_double() const;
    int64_t to_int64() const;  // value must fit
    bool is_zero() const { return limbs.empty(); }
};

// CRT composition to the unique representative in (-Q/2, Q/2], Q the product
// of the active primes. Input must be in coefficient form.
std::vector<SignedBig> crt_compose(const RnsPolynomial& p);
std::vector<SignedBig> crt_compose_rows(const std::vector<std::vector<u64>>& rows,
                                        const std::vector<u64>& primes);

// Centered residues of an integer value across the first `num_primes` primes.
std::vector<u64> residues_of_int(const Ring& ring, size_t num_primes, int64_t value);

}  // namespace ckks
