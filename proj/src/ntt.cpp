// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/ntt.hpp"

namespace ckks {

namespace {

int log2_exact(size_t n) {
    int l = 0;
    while ((size_t{1} << l) < n) ++l;
    return l;
}

}  // namespace

NttTable::NttTable(const PrimeModulus& prime, size_t degree)
    : n_(degree), log_n_(log2_exact(degree)), q_(prime.value) {
    bit_rev_.resize(n_);
    for (size_t i = 0; i < n_; ++i) {
        uint32_t r = 0;
        for (int b = 0; b < log_n_; ++b) {
            if (i & (size_t{1} << b)) r |= 1u << (log_n_ - 1 - b);
        }
        bit_rev_[i] = r;
    }

    psi_rev_.resize(n_);
    psi_rev_shoup_.resize(n_);
    ipsi_rev_.resize(n_);
    ipsi_rev_shoup_.resize(n_);
    u64 psi = prime.root_2n;
    u64 ipsi = prime.root_2n_inv;
    std::vector<u64> psi_pow(n_), ipsi_pow(n_);
    psi_pow[0] = 1;
    ipsi_pow[0] = 1;
    for (size_t i = 1; i < n_; ++i) {
        psi_pow[i] = mul_mod(psi_pow[i - 1], psi, q_);
        ipsi_pow[i] = mul_mod(ipsi_pow[i - 1], ipsi, q_);
    }
    for (size_t i = 0; i < n_; ++i) {
        psi_rev_[i] = psi_pow[bit_rev_[i]];
        ipsi_rev_[i] = ipsi_pow[bit_rev_[i]];
        psi_rev_shoup_[i] = shoup_precompute(psi_rev_[i], q_);
        ipsi_rev_shoup_[i] = shoup_precompute(ipsi_rev_[i], q_);
    }
    n_inv_ = pow_mod(n_ % q_, q_ - 2, q_);
    n_inv_shoup_ = shoup_precompute(n_inv_, q_);
}

void NttTable::forward(u64* a) const {
    const u64 q = q_;
    size_t t = n_;
    for (size_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        for (size_t i = 0; i < m; ++i) {
            const u64 s = psi_rev_[m + i];
            const u64 s_shoup = psi_rev_shoup_[m + i];
            u64* x = a + 2 * i * t;
            u64* y = x + t;
            for (size_t j = 0; j < t; ++j) {
                u64 u = x[j];
                u64 v = mul_mod_shoup(y[j], s, s_shoup, q);
                x[j] = add_mod(u, v, q);
                y[j] = sub_mod(u, v, q);
            }
        }
    }
    // Output of the butterflies is bit-reversed; put evaluations at
    // psi^(2j+1) into natural order j.
    for (size_t i = 0; i < n_; ++i) {
        uint32_t r = bit_rev_[i];
        if (i < r) std::swap(a[i], a[r]);
    }
}

void NttTable::inverse(u64* a) const {
    const u64 q = q_;
    for (size_t i = 0; i < n_; ++i) {
        uint32_t r = bit_rev_[i];
        if (i < r) std::swap(a[i], a[r]);
    }
    size_t t = 1;
    for (size_t m = n_; m > 1; m >>= 1) {
        size_t h = m >> 1;
        size_t j1 = 0;
        for (size_t i = 0; i < h; ++i) {
            const u64 s = ipsi_rev_[h + i];
            const u64 s_shoup = ipsi_rev_shoup_[h + i];
            u64* x = a + j1;
            u64* y = x + t;
            for (size_t j = 0; j < t; ++j) {
                u64 u = x[j];
                u64 v = y[j];
                x[j] = add_mod(u, v, q);
                y[j] = mul_mod_shoup(sub_mod(u, v, q), s, s_shoup, q);
            }
            j1 += 2 * t;
        }
        t <<= 1;
    }
    for (size_t j = 0; j < n_; ++j) {
        a[j] = mul_mod_shoup(a[j], n_inv_, n_inv_shoup_, q);
    }
}

}  // namespace ckks
