// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <memory>

#include "ckkslab/params.hpp"
#include "ckkslab/rns_poly.hpp"

namespace ckks {

struct ContextOptions {
    // Ciphertexts carry a plaintext twin for noise observation when set.
    bool shadow_mode = false;
    ScalePolicy scale_policy = ScalePolicy::Exact;
    // Standard deviation of the RLWE error terms. The scheme-wide default is
    // calibrated so decrypted precision tracks the reference benchmark stack;
    // see NOISE.md in the repo root.
    double noise_sigma = 30.0;
};

// Immutable parameter bundle: modulus chain, NTT tables, canonical-embedding
// FFT tables and slot index maps. Shareable across threads.
class CkksContext {
public:
    static std::shared_ptr<const CkksContext> create(const CkksParams& params,
                                                     const ContextOptions& options = {});

    const CkksParams& params() const { return params_; }
    const ContextOptions& options() const { return options_; }
    const std::shared_ptr<const Ring>& ring() const { return ring_; }
    const ModulusChain& chain() const { return ring_->chain; }

    size_t degree() const { return params_.poly_modulus_degree; }
    size_t slot_count() const { return degree() / 2; }
    double global_scale() const { return params_.global_scale(); }
    // Level fresh ciphertexts are encrypted at.
    size_t top_level() const { return chain().top_data_level(); }

    bool shadow_mode() const { return options_.shadow_mode; }
    ScalePolicy scale_policy() const { return options_.scale_policy; }
    double noise_sigma() const { return options_.noise_sigma; }

    // Galois element (power of 5 mod 2N) realizing a left rotation by
    // `steps` slots; steps may be negative.
    uint64_t galois_element(int64_t steps) const;

    // -- canonical embedding ------------------------------------------------
    // values (length <= N/2, zero-padded) -> scaled coefficients rounded to
    // integers (held as exact integer-valued doubles so scales beyond 2^62
    // work). With replicate = true the value block is tiled across all slots
    // (length must divide N/2).
    std::vector<double> embed(const std::vector<double>& values, double scale,
                              bool replicate = false) const;
    // coefficient view (as doubles) -> slot values, length N/2.
    std::vector<double> unembed(const std::vector<double>& coeffs, double scale) const;

private:
    CkksParams params_;
    ContextOptions options_;
    std::shared_ptr<const Ring> ring_;
    std::vector<uint32_t> slot_to_freq_;       // slot j -> FFT bin of zeta^(5^j)
    std::vector<uint32_t> slot_to_freq_conj_;  // slot j -> FFT bin of the conjugate
    std::vector<std::complex<double>> twist_;  // zeta^k, k = 0..N-1
    std::vector<std::complex<double>> fft_roots_;  // e^(2 pi i k / N), k = 0..N-1
    std::vector<uint32_t> fft_bit_rev_;

    void fft(std::vector<std::complex<double>>& a, bool inverse) const;
};

}  // namespace ckks
