// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/rns_poly.hpp"

#include <cmath>

#include "ckkslab/rng.hpp"

namespace ckks {

std::shared_ptr<const Ring> Ring::create(const std::vector<int>& bit_sizes, size_t degree) {
    auto ring = std::make_shared<Ring>();
    ring->chain = make_modulus_chain(bit_sizes, degree);
    ring->ntt.reserve(ring->chain.size());
    for (const auto& prime : ring->chain.primes) {
        ring->ntt.emplace_back(prime, degree);
    }
    return ring;
}

RnsPolynomial RnsPolynomial::zero(std::shared_ptr<const Ring> ring, size_t num_primes,
                                  PolyForm form) {
    RnsPolynomial p;
    p.ring = std::move(ring);
    p.form = form;
    p.rows.assign(num_primes, std::vector<u64>(p.ring->degree(), 0));
    return p;
}

void RnsPolynomial::truncate(size_t num_primes) {
    if (num_primes < rows.size()) rows.resize(num_primes);
}

void ntt_transform(RnsPolynomial& p, NttDirection direction) {
    PolyForm expected = direction == NttDirection::Forward ? PolyForm::Coeff : PolyForm::Ntt;
    if (p.form != expected) {
        throw_error(ErrorCode::FormMismatch, direction == NttDirection::Forward
                                                 ? "forward NTT expects coefficient form"
                                                 : "inverse NTT expects evaluation form");
    }
    for (size_t i = 0; i < p.rows.size(); ++i) {
        if (direction == NttDirection::Forward) {
            p.ring->ntt[i].forward(p.rows[i].data());
        } else {
            p.ring->ntt[i].inverse(p.rows[i].data());
        }
    }
    p.form = expected == PolyForm::Coeff ? PolyForm::Ntt : PolyForm::Coeff;
}

RnsPolynomial to_form(const RnsPolynomial& p, PolyForm form) {
    if (p.form == form) return p;
    RnsPolynomial copy = p;
    ntt_transform(copy, form == PolyForm::Ntt ? NttDirection::Forward : NttDirection::Inverse);
    return copy;
}

namespace {

void check_compatible(const RnsPolynomial& a, const RnsPolynomial& b, bool need_same_form) {
    if (a.degree() != b.degree()) {
        throw_error(ErrorCode::DimensionMismatch, "ring degrees differ");
    }
    if (a.rows.size() != b.rows.size()) {
        throw_error(ErrorCode::LevelMismatch, "operand levels differ");
    }
    if (need_same_form && a.form != b.form) {
        throw_error(ErrorCode::FormMismatch, "operand forms differ");
    }
}

}  // namespace

void poly_add_inplace(RnsPolynomial& a, const RnsPolynomial& b) {
    check_compatible(a, b, true);
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const u64 q = a.ring->prime(i).value;
        u64* x = a.rows[i].data();
        const u64* y = b.rows[i].data();
        for (size_t j = 0; j < a.degree(); ++j) x[j] = add_mod(x[j], y[j], q);
    }
}

void poly_sub_inplace(RnsPolynomial& a, const RnsPolynomial& b) {
    check_compatible(a, b, true);
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const u64 q = a.ring->prime(i).value;
        u64* x = a.rows[i].data();
        const u64* y = b.rows[i].data();
        for (size_t j = 0; j < a.degree(); ++j) x[j] = sub_mod(x[j], y[j], q);
    }
}

RnsPolynomial poly_add(const RnsPolynomial& a, const RnsPolynomial& b) {
    RnsPolynomial r = a;
    poly_add_inplace(r, b);
    return r;
}

RnsPolynomial poly_sub(const RnsPolynomial& a, const RnsPolynomial& b) {
    RnsPolynomial r = a;
    poly_sub_inplace(r, b);
    return r;
}

RnsPolynomial poly_negate(const RnsPolynomial& a) {
    RnsPolynomial r = a;
    for (size_t i = 0; i < r.rows.size(); ++i) {
        const u64 q = r.ring->prime(i).value;
        for (auto& c : r.rows[i]) c = c == 0 ? 0 : q - c;
    }
    return r;
}

RnsPolynomial poly_mul(const RnsPolynomial& a, const RnsPolynomial& b) {
    check_compatible(a, b, false);
    RnsPolynomial x = to_form(a, PolyForm::Ntt);
    RnsPolynomial y = to_form(b, PolyForm::Ntt);
    for (size_t i = 0; i < x.rows.size(); ++i) {
        const u64 q = x.ring->prime(i).value;
        u64* px = x.rows[i].data();
        const u64* py = y.rows[i].data();
        for (size_t j = 0; j < x.degree(); ++j) px[j] = mul_mod(px[j], py[j], q);
    }
    return x;
}

void poly_mul_accumulate(RnsPolynomial& acc, const RnsPolynomial& a, const RnsPolynomial& b) {
    check_compatible(a, b, true);
    check_compatible(acc, a, true);
    if (acc.form != PolyForm::Ntt) {
        throw_error(ErrorCode::FormMismatch, "accumulator must be in evaluation form");
    }
    for (size_t i = 0; i < acc.rows.size(); ++i) {
        const u64 q = acc.ring->prime(i).value;
        u64* pa = acc.rows[i].data();
        const u64* px = a.rows[i].data();
        const u64* py = b.rows[i].data();
        for (size_t j = 0; j < acc.degree(); ++j) {
            pa[j] = add_mod(pa[j], mul_mod(px[j], py[j], q), q);
        }
    }
}

namespace {

RnsPolynomial from_int_coeffs(std::shared_ptr<const Ring> ring, size_t num_primes,
                              const std::vector<int64_t>& coeffs) {
    RnsPolynomial p = RnsPolynomial::zero(ring, num_primes);
    for (size_t i = 0; i < num_primes; ++i) {
        const u64 q = ring->prime(i).value;
        for (size_t j = 0; j < coeffs.size(); ++j) {
            int64_t v = coeffs[j];
            p.rows[i][j] = v >= 0 ? static_cast<u64>(v) % q
                                  : q - (static_cast<u64>(-v) % q);
        }
    }
    return p;
}

}  // namespace

RnsPolynomial sample_ternary(std::shared_ptr<const Ring> ring, size_t num_primes, uint64_t seed) {
    Rng rng(seed);
    std::vector<int64_t> coeffs(ring->degree());
    for (auto& c : coeffs) c = static_cast<int64_t>(rng.next_below(3)) - 1;
    return from_int_coeffs(std::move(ring), num_primes, coeffs);
}

RnsPolynomial sample_gaussian(std::shared_ptr<const Ring> ring, size_t num_primes, double sigma,
                              uint64_t seed) {
    Rng rng(seed);
    std::vector<int64_t> coeffs(ring->degree());
    for (auto& c : coeffs) c = static_cast<int64_t>(std::llround(rng.next_gaussian(sigma)));
    return from_int_coeffs(std::move(ring), num_primes, coeffs);
}

RnsPolynomial sample_uniform(std::shared_ptr<const Ring> ring, size_t num_primes, uint64_t seed) {
    RnsPolynomial p = RnsPolynomial::zero(ring, num_primes);
    for (size_t i = 0; i < num_primes; ++i) {
        Rng rng(derive_seed(seed, i));
        const u64 q = ring->prime(i).value;
        for (auto& c : p.rows[i]) c = rng.next_below(q);
    }
    return p;
}

std::vector<u64> residues_of_int(const Ring& ring, size_t num_primes, int64_t value) {
    std::vector<u64> out(num_primes);
    for (size_t i = 0; i < num_primes; ++i) {
        const u64 q = ring.prime(i).value;
        out[i] = value >= 0 ? static_cast<u64>(value) % q : q - (static_cast<u64>(-value) % q);
    }
    return out;
}

namespace big {

void mul_add(std::vector<u64>& limbs, u64 mul, u64 add) {
    u128 carry = add;
    for (auto& limb : limbs) {
        u128 cur = static_cast<u128>(limb) * mul + carry;
        limb = static_cast<u64>(cur);
        carry = cur >> 64;
    }
    if (carry != 0) limbs.push_back(static_cast<u64>(carry));
}

void normalize(std::vector<u64>& limbs) {
    while (!limbs.empty() && limbs.back() == 0) limbs.pop_back();
}

int compare(const std::vector<u64>& a, const std::vector<u64>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

// a -= b, requires a >= b
void sub_from(std::vector<u64>& a, const std::vector<u64>& b) {
    u64 borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        u128 rhs = static_cast<u128>(i < b.size() ? b[i] : 0) + borrow;
        u128 lhs = a[i];
        if (lhs >= rhs) {
            a[i] = static_cast<u64>(lhs - rhs);
            borrow = 0;
        } else {
            a[i] = static_cast<u64>((static_cast<u128>(1) << 64) + lhs - rhs);
            borrow = 1;
        }
    }
    normalize(a);
}

std::vector<u64> shift_right_one(std::vector<u64> limbs) {
    for (size_t i = 0; i < limbs.size(); ++i) {
        limbs[i] >>= 1;
        if (i + 1 < limbs.size() && (limbs[i + 1] & 1)) limbs[i] |= 1ULL << 63;
    }
    normalize(limbs);
    return limbs;
}

}  // namespace big

double SignedBig::to_double() const {
    double v = 0.0;
    for (size_t i = limbs.size(); i-- > 0;) {
        v = v * 18446744073709551616.0 + static_cast<double>(limbs[i]);
    }
    return negative ? -v : v;
}

int64_t SignedBig::to_int64() const {
    if (limbs.empty()) return 0;
    int64_t v = static_cast<int64_t>(limbs[0]);
    return negative ? -v : v;
}

std::vector<SignedBig> crt_compose_rows(const std::vector<std::vector<u64>>& rows,
                                        const std::vector<u64>& primes) {
    const size_t levels = rows.size();
    const size_t n = rows[0].size();

    // Precompute inv(q_i) mod q_j factors for mixed-radix conversion.
    std::vector<std::vector<u64>> inv_q(levels, std::vector<u64>(levels, 0));
    for (size_t j = 1; j < levels; ++j) {
        const u64 qj = primes[j];
        for (size_t i = 0; i < j; ++i) {
            inv_q[j][i] = pow_mod(primes[i] % qj, qj - 2, qj);
        }
    }

    // Q and Q/2 as big integers.
    std::vector<u64> q_total{1};
    for (size_t i = 0; i < levels; ++i) big::mul_add(q_total, primes[i], 0);
    std::vector<u64> half_q = big::shift_right_one(q_total);

    std::vector<SignedBig> out(n);
    std::vector<u64> digits(levels);
    for (size_t k = 0; k < n; ++k) {
        // Mixed-radix digits: v_j = ((r_j - v_0) q_0^-1 - v_1) q_1^-1 ... mod q_j
        for (size_t j = 0; j < levels; ++j) {
            const u64 qj = primes[j];
            u64 v = rows[j][k];
            for (size_t i = 0; i < j; ++i) {
                v = sub_mod(v, digits[i] % qj, qj);
                v = mul_mod(v, inv_q[j][i], qj);
            }
            digits[j] = v;
        }
        // Value = v_0 + q_0 (v_1 + q_1 (v_2 + ...)).
        std::vector<u64> mag{digits[levels - 1]};
        for (size_t j = levels - 1; j-- > 0;) {
            big::mul_add(mag, primes[j], digits[j]);
        }
        big::normalize(mag);
        SignedBig& value = out[k];
        if (big::compare(mag, half_q) > 0) {
            std::vector<u64> neg = q_total;
            big::sub_from(neg, mag);
            value.negative = true;
            value.limbs = std::move(neg);
        } else {
            value.limbs = std::move(mag);
        }
        if (value.limbs.empty()) value.negative = false;
    }
    return out;
}

std::vector<SignedBig> crt_compose(const RnsPolynomial& p) {
    if (p.form != PolyForm::Coeff) {
        throw_error(ErrorCode::FormMismatch, "crt_compose expects coefficient form");
    }
    std::vector<u64> primes(p.rows.size());
    for (size_t i = 0; i < primes.size(); ++i) primes[i] = p.ring->prime(i).value;
    return crt_compose_rows(p.rows, primes);
}

}  // namespace ckks
