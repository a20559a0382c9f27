// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/keys.hpp"

#include "ckkslab/rng.hpp"

namespace ckks {

namespace {

// b = -a T_key ... for key generation we always need -(a s) + e over a given
// number of rows, everything in NTT form.
RnsPolynomial make_key_b(const RnsPolynomial& a, const RnsPolynomial& s_ntt, size_t rows,
                         double sigma, uint64_t seed, const CkksContext& ctx) {
    RnsPolynomial as = a;  // a has `rows` rows already
    for (size_t i = 0; i < rows; ++i) {
        const u64 q = ctx.ring()->prime(i).value;
        u64* x = as.rows[i].data();
        const u64* y = s_ntt.rows[i].data();
        for (size_t j = 0; j < as.degree(); ++j) x[j] = mul_mod(x[j], y[j], q);
    }
    RnsPolynomial e = sample_gaussian(ctx.ring(), rows, sigma, seed);
    ntt_transform(e, NttDirection::Forward);
    return poly_sub(e, as);  // e - a s
}

}  // namespace

KeyPair keygen(const CkksContext& ctx, uint64_t seed) {
    const auto& ring = ctx.ring();
    const size_t all = ctx.chain().size();
    const size_t data_rows = ctx.chain().data_prime_count();

    KeyPair kp;
    kp.secret.seed = seed;
    kp.secret.s_coeff = sample_ternary(ring, all, derive_seed(seed, 0x5ec));
    kp.secret.s_ntt = to_form(kp.secret.s_coeff, PolyForm::Ntt);
    kp.secret.s_sq_ntt = poly_mul(kp.secret.s_ntt, kp.secret.s_ntt);

    RnsPolynomial a = sample_uniform(ring, data_rows, derive_seed(seed, 0xa));
    a.form = PolyForm::Ntt;  // uniform residues are uniform in either domain
    RnsPolynomial s_data = kp.secret.s_ntt;
    s_data.truncate(data_rows);
    kp.public_key.a = a;
    kp.public_key.b =
        make_key_b(a, s_data, data_rows, ctx.noise_sigma(), derive_seed(seed, 0xe), ctx);
    return kp;
}

namespace {

// Builds the switching key for secret factor T (NTT form, full rows).
KswitchKey make_kswitch_key(const SecretKey& sk, const RnsPolynomial& target_ntt,
                            const CkksContext& ctx, uint64_t seed_tag) {
    if (!ctx.chain().has_key_prime()) {
        throw_error(ErrorCode::LevelExhausted,
                    "chain has no key-switching prime; relinearization and rotation "
                    "are unavailable on single-prime chains");
    }
    const auto& ring = ctx.ring();
    const size_t all = ctx.chain().size();
    const size_t data = ctx.chain().data_prime_count();
    const u64 key_prime = ctx.chain().key_prime().value;

    KswitchKey key;
    key.b.reserve(data);
    key.a.reserve(data);
    for (size_t j = 0; j < data; ++j) {
        RnsPolynomial a =
            sample_uniform(ring, all, derive_seed(sk.seed, seed_tag, 2 * j));
        a.form = PolyForm::Ntt;
        RnsPolynomial b = make_key_b(a, sk.s_ntt, all, ctx.noise_sigma(),
                                     derive_seed(sk.seed, seed_tag, 2 * j + 1), ctx);
        // Add P g_j T: the term lives only in row j (P mod q_j there, 0
        // elsewhere including the key-prime row).
        const u64 qj = ring->prime(j).value;
        const u64 p_mod = key_prime % qj;
        u64* bx = b.rows[j].data();
        const u64* tx = target_ntt.rows[j].data();
        for (size_t i = 0; i < b.degree(); ++i) {
            bx[i] = add_mod(bx[i], mul_mod(p_mod, tx[i], qj), qj);
        }
        key.b.push_back(std::move(b));
        key.a.push_back(std::move(a));
    }
    return key;
}

}  // namespace

RelinKey gen_relin_key(const SecretKey& sk, const CkksContext& ctx) {
    RelinKey rk;
    rk.key = make_kswitch_key(sk, sk.s_sq_ntt, ctx, 0x311);
    return rk;
}

RnsPolynomial apply_automorphism(const RnsPolynomial& p, uint64_t element) {
    if (p.form != PolyForm::Coeff) {
        throw_error(ErrorCode::FormMismatch, "automorphism expects coefficient form");
    }
    const size_t n = p.degree();
    const uint64_t two_n = 2 * n;
    RnsPolynomial out = RnsPolynomial::zero(p.ring, p.rows.size());
    for (size_t row = 0; row < p.rows.size(); ++row) {
        const u64 q = p.ring->prime(row).value;
        const u64* src = p.rows[row].data();
        u64* dst = out.rows[row].data();
        uint64_t idx = 0;
        for (size_t i = 0; i < n; ++i) {
            // X^i -> X^(i * element), X^N = -1
            if (idx < n) {
                dst[idx] = src[i];
            } else {
                u64 v = src[i];
                dst[idx - n] = v == 0 ? 0 : q - v;
            }
            idx = (idx + element) % two_n;
        }
    }
    return out;
}

GaloisKeys gen_galois_keys(const SecretKey& sk, const std::vector<int64_t>& steps,
                           const CkksContext& ctx) {
    GaloisKeys gk;
    for (int64_t step : steps) {
        uint64_t element = ctx.galois_element(step);
        gk.steps[step] = element;
        if (gk.keys.count(element)) continue;
        RnsPolynomial s_rot = apply_automorphism(sk.s_coeff, element);
        ntt_transform(s_rot, NttDirection::Forward);
        gk.keys.emplace(element, make_kswitch_key(sk, s_rot, ctx, 0x6a10 + element));
    }
    return gk;
}

std::pair<RnsPolynomial, RnsPolynomial> switch_key(const RnsPolynomial& c, const KswitchKey& key,
                                                   const CkksContext& ctx) {
    const auto& ring = ctx.ring();
    const size_t n = c.degree();
    const size_t level = c.level();
    const size_t data_count = level + 1;
    const size_t key_row = ctx.chain().size() - 1;
    const u64 key_prime = ctx.chain().key_prime().value;
    const u64 half_p = (key_prime - 1) / 2;

    RnsPolynomial c_coeff = to_form(c, PolyForm::Coeff);

    // Accumulators over the extended modulus set {q_0..q_level, P}; the key
    // prime sits in the last row.
    const size_t ext = data_count + 1;
    std::vector<std::vector<u64>> acc0(ext, std::vector<u64>(n, 0));
    std::vector<std::vector<u64>> acc1(ext, std::vector<u64>(n, 0));

    std::vector<u64> component(n);
    for (size_t j = 0; j < data_count; ++j) {
        const std::vector<u64>& digits = c_coeff.rows[j];
        for (size_t m = 0; m < ext; ++m) {
            size_t prime_idx = m < data_count ? m : key_row;
            const u64 q = ring->prime(prime_idx).value;
            const NttTable& ntt = ring->ntt[prime_idx];
            for (size_t i = 0; i < n; ++i) {
                u64 v = digits[i];
                component[i] = v >= q ? v % q : v;
            }
            ntt.forward(component.data());
            const u64* kb = key.b[j].rows[prime_idx].data();
            const u64* ka = key.a[j].rows[prime_idx].data();
            u64* a0 = acc0[m].data();
            u64* a1 = acc1[m].data();
            for (size_t i = 0; i < n; ++i) {
                a0[i] = add_mod(a0[i], mul_mod(component[i], kb[i], q), q);
                a1[i] = add_mod(a1[i], mul_mod(component[i], ka[i], q), q);
            }
        }
    }

    // Divide by P with rounding: add floor(P/2), subtract the P-row residue,
    // multiply by P^-1 per remaining prime.
    auto divide_round = [&](std::vector<std::vector<u64>>& acc) {
        for (size_t m = 0; m < ext; ++m) {
            size_t prime_idx = m < data_count ? m : key_row;
            ring->ntt[prime_idx].inverse(acc[m].data());
        }
        std::vector<u64>& p_row = acc[ext - 1];
        for (size_t i = 0; i < n; ++i) p_row[i] = add_mod(p_row[i], half_p, key_prime);
        RnsPolynomial out = RnsPolynomial::zero(ring, data_count);
        for (size_t m = 0; m < data_count; ++m) {
            const u64 q = ring->prime(m).value;
            const u64 half_p_mod = half_p % q;
            const u64 p_inv = pow_mod(key_prime % q, q - 2, q);
            u64* dst = out.rows[m].data();
            const u64* src = acc[m].data();
            for (size_t i = 0; i < n; ++i) {
                u64 v = add_mod(src[i], half_p_mod, q);
                u64 t = p_row[i] % q;
                dst[i] = mul_mod(sub_mod(v, t, q), p_inv, q);
            }
        }
        ntt_transform(out, NttDirection::Forward);
        return out;
    };

    return {divide_round(acc0), divide_round(acc1)};
}

}  // namespace ckks
