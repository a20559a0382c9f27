// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/context.hpp"

#include <cmath>

namespace ckks {

std::shared_ptr<const CkksContext> CkksContext::create(const CkksParams& params,
                                                       const ContextOptions& options) {
    validate_params(params);  // throws on structural problems
    auto ctx = std::make_shared<CkksContext>();
    ctx->params_ = params;
    ctx->options_ = options;
    ctx->ring_ = Ring::create(params.coeff_bit_sizes, params.poly_modulus_degree);

    const size_t n = params.poly_modulus_degree;
    const size_t two_n = 2 * n;

    // Slot ordering follows the orbit of 5 in (Z/2N)*: slot j corresponds to
    // evaluation at zeta^(5^j). FFT bin of an odd exponent e is (e - 1) / 2.
    ctx->slot_to_freq_.resize(n / 2);
    ctx->slot_to_freq_conj_.resize(n / 2);
    uint64_t e = 1;
    for (size_t j = 0; j < n / 2; ++j) {
        ctx->slot_to_freq_[j] = static_cast<uint32_t>((e - 1) / 2);
        ctx->slot_to_freq_conj_[j] = static_cast<uint32_t>((two_n - e - 1) / 2);
        e = (e * 5) % two_n;
    }

    ctx->twist_.resize(n);
    ctx->fft_roots_.resize(n);
    const double pi = 3.14159265358979323846;
    for (size_t k = 0; k < n; ++k) {
        double angle = pi * static_cast<double>(k) / static_cast<double>(n);
        ctx->twist_[k] = {std::cos(angle), std::sin(angle)};  // zeta^k
        double fangle = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        ctx->fft_roots_[k] = {std::cos(fangle), std::sin(fangle)};
    }

    int log_n = 0;
    while ((size_t{1} << log_n) < n) ++log_n;
    ctx->fft_bit_rev_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        uint32_t r = 0;
        for (int b = 0; b < log_n; ++b) {
            if (i & (size_t{1} << b)) r |= 1u << (log_n - 1 - b);
        }
        ctx->fft_bit_rev_[i] = r;
    }
    return ctx;
}

uint64_t CkksContext::galois_element(int64_t steps) const {
    const size_t slots = slot_count();
    const uint64_t two_n = 2 * degree();
    int64_t r = steps % static_cast<int64_t>(slots);
    if (r < 0) r += static_cast<int64_t>(slots);
    uint64_t g = 1;
    for (int64_t i = 0; i < r; ++i) g = (g * 5) % two_n;
    return g;
}

// Iterative radix-2 FFT computing F[t] = sum_k a[k] w^(kt) with
// w = e^(+-2 pi i / N); inverse includes the 1/N factor.
void CkksContext::fft(std::vector<std::complex<double>>& a, bool inverse) const {
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) {
        uint32_t r = fft_bit_rev_[i];
        if (i < r) std::swap(a[i], a[r]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        size_t stride = n / len;
        for (size_t start = 0; start < n; start += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = fft_roots_[k * stride];
                if (inverse) w = std::conj(w);
                std::complex<double> u = a[start + k];
                std::complex<double> v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        double inv_n = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv_n;
    }
}

std::vector<double> CkksContext::embed(const std::vector<double>& values, double scale,
                                       bool replicate) const {
    const size_t n = degree();
    const size_t slots = n / 2;
    std::vector<std::complex<double>> freq(n, {0.0, 0.0});
    for (size_t j = 0; j < slots; ++j) {
        double v;
        if (replicate) {
            v = values.empty() ? 0.0 : values[j % values.size()];
        } else {
            v = j < values.size() ? values[j] : 0.0;
        }
        freq[slot_to_freq_[j]] = {v, 0.0};
        freq[slot_to_freq_conj_[j]] = {v, 0.0};  // conjugate of a real value
    }
    fft(freq, true);
    std::vector<double> coeffs(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> c = freq[k] * std::conj(twist_[k]);
        // Above 2^53 the double grid is coarser than 1, so the value is
        // already an exact integer.
        coeffs[k] = std::nearbyint(c.real() * scale);
    }
    return coeffs;
}

std::vector<double> CkksContext::unembed(const std::vector<double>& coeffs, double scale) const {
    const size_t n = degree();
    std::vector<std::complex<double>> freq(n);
    for (size_t k = 0; k < n; ++k) freq[k] = coeffs[k] * twist_[k];
    fft(freq, false);
    std::vector<double> values(n / 2);
    for (size_t j = 0; j < n / 2; ++j) {
        values[j] = freq[slot_to_freq_[j]].real() / scale;
    }
    return values;
}

}  // namespace ckks
