// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ckkslab/keys.hpp"

namespace ckks {

struct Plaintext {
    RnsPolynomial poly;  // NTT form
    double scale = 1.0;
    size_t level = 0;
    // Slot values, kept only in shadow mode so ciphertext shadows can be
    // propagated through plaintext operands.
    std::optional<std::vector<double>> values;
};

struct Ciphertext {
    std::vector<RnsPolynomial> parts;  // 2, or 3 transiently after multiply
    double scale = 1.0;
    size_t level = 0;
    // Plaintext twin for noise observation (shadow mode only).
    std::optional<std::vector<double>> shadow;

    size_t part_count() const { return parts.size(); }
};

struct NoiseReport {
    double max_error = 0.0;
    double mean_error = 0.0;
    size_t level = 0;
    double exact_scale = 0.0;
    size_t remaining_primes = 0;
};

// -- encoding ----------------------------------------------------------------

// Canonical embedding at the given scale. Values are placed in the first
// slots and zero-padded; with replicate = true the block is tiled across all
// N/2 slots instead (the packing rotation-based folds want). Encodes at the
// top ciphertext level unless `level` says otherwise.
Plaintext encode(const std::vector<double>& values, double scale, const CkksContext& ctx,
                 bool replicate = false, std::optional<size_t> level = std::nullopt);
std::vector<double> decode(const Plaintext& pt, const CkksContext& ctx);

// -- encryption --------------------------------------------------------------

Ciphertext encrypt(const Plaintext& pt, const PublicKey& pk, const CkksContext& ctx,
                   std::optional<uint64_t> seed = std::nullopt);
Plaintext decrypt(const Ciphertext& ct, const SecretKey& sk, const CkksContext& ctx);

// -- arithmetic --------------------------------------------------------------

Ciphertext add(const Ciphertext& a, const Ciphertext& b, const CkksContext& ctx);
Ciphertext sub(const Ciphertext& a, const Ciphertext& b, const CkksContext& ctx);
Ciphertext negate(const Ciphertext& a, const CkksContext& ctx);
Ciphertext add_plain(const Ciphertext& a, const Plaintext& pt, const CkksContext& ctx);

// Tensor product; result has 3 parts and scale a.scale * b.scale. Requires a
// level below the current one so the caller can rescale.
Ciphertext multiply(const Ciphertext& a, const Ciphertext& b, const CkksContext& ctx);
Ciphertext multiply_plain(const Ciphertext& a, const Plaintext& pt, const CkksContext& ctx);
Ciphertext relinearize(const Ciphertext& ct, const RelinKey& rk, const CkksContext& ctx);

// Drops the last active prime; scale handling follows the context's policy.
Ciphertext rescale(const Ciphertext& ct, const CkksContext& ctx);
// RNS modulus switch (drop primes, scale unchanged).
Ciphertext mod_switch_to_level(const Ciphertext& ct, size_t level, const CkksContext& ctx);
Plaintext mod_switch_to_level(const Plaintext& pt, size_t level, const CkksContext& ctx);

// Cyclic left rotation of the slot vector by k (negative k rotates right).
Ciphertext rotate(const Ciphertext& ct, int64_t k, const GaloisKeys& gk, const CkksContext& ctx);

// Inner product of two packed vectors: multiply, relinearize, rescale, then a
// log2(next_pow2(len)) rotate-and-add fold. Slot 0 carries the sum; if the
// operands were replicate-packed with period next_pow2(len), every slot does.
Ciphertext dot(const Ciphertext& a, const Ciphertext& b, size_t len, const GaloisKeys& gk,
               const RelinKey& rk, const CkksContext& ctx);

// Evaluates c0 + c1 x + c2 x^2 + c3 x^3 slotwise (degree <= 3), consuming two
// levels for degrees 2..3 and one for degrees 0..1.
Ciphertext polyval(const Ciphertext& ct, const std::vector<double>& coeffs, const RelinKey& rk,
                   const CkksContext& ctx);

// -- packed matrices ---------------------------------------------------------

enum class RowPacking {
    ZeroPad,     // [row | zeros]
    DoubledRow,  // [row | row | zeros]; required by matmul_plain's rotations
};

std::vector<Ciphertext> encrypt_matrix_rows(const std::vector<std::vector<double>>& matrix,
                                            RowPacking packing, const PublicKey& pk,
                                            const CkksContext& ctx, uint64_t seed);

// Ciphertext x plaintext product: row i of the result packs row i of A * B.
// encA rows must be DoubledRow-packed; B is square with side = row length.
std::vector<Ciphertext> matmul_plain(const std::vector<Ciphertext>& enc_a_rows,
                                     const std::vector<std::vector<double>>& b,
                                     const GaloisKeys& gk, const CkksContext& ctx);

// Ciphertext x ciphertext product; entry (i, j) of the grid holds the dot of
// A's row i with B's column j in slot 0.
std::vector<std::vector<Ciphertext>> matmul_ct(const std::vector<Ciphertext>& enc_a_rows,
                                               const std::vector<Ciphertext>& enc_b_cols,
                                               size_t inner_len, const GaloisKeys& gk,
                                               const RelinKey& rk, const CkksContext& ctx);

// -- observation -------------------------------------------------------------

NoiseReport noise_report(const Ciphertext& ct, const SecretKey& sk, const CkksContext& ctx);

// -- serialization (versioned binary, see README) ----------------------------

std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct, const CkksContext& ctx);
Ciphertext deserialize_ciphertext(const std::vector<uint8_t>& bytes, const CkksContext& ctx);
std::vector<uint8_t> serialize_secret_key(const SecretKey& sk, const CkksContext& ctx);
SecretKey deserialize_secret_key(const std::vector<uint8_t>& bytes, const CkksContext& ctx);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);
std::vector<uint8_t> read_file(const std::string& path);

}  // namespace ckks
