// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/scheme.hpp"

#include <atomic>
#include <cmath>

#include "ckkslab/rng.hpp"

namespace ckks {

namespace {

constexpr double kScaleTolerance = 0x1.0p-20;  // relative scale-equality bound

bool scales_close(double a, double b) {
    return std::abs(a - b) <= kScaleTolerance * std::max(std::abs(a), std::abs(b));
}

std::atomic<uint64_t> g_encrypt_counter{0x9b97f4a7c15ULL};

size_t next_pow2(size_t v) {
    size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Exact reduction of an integer-valued double (|c| can exceed 2^64) mod q.
u64 reduce_double_mod(double c, u64 q) {
    bool neg = c < 0;
    double a = std::abs(c);
    u64 r;
    if (a < 0x1p62) {
        r = static_cast<u64>(a) % q;
    } else {
        int exp;
        double m = std::frexp(a, &exp);                   // a = m 2^exp, m in [0.5, 1)
        u64 mant = static_cast<u64>(std::ldexp(m, 53));   // 53-bit integer, exact
        u64 e2 = static_cast<u64>(exp - 53);
        r = mul_mod(mant % q, pow_mod(2, e2, q), q);
    }
    if (r == 0) return 0;
    return neg ? q - r : r;
}

}  // namespace

Plaintext encode(const std::vector<double>& values, double scale, const CkksContext& ctx,
                 bool replicate, std::optional<size_t> level) {
    if (values.size() > ctx.slot_count()) {
        throw_error(ErrorCode::TooManySlots, "value count " + std::to_string(values.size()) +
                                                 " exceeds slot count " +
                                                 std::to_string(ctx.slot_count()));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw_error(ErrorCode::ScaleOverflow, "scale must be positive and finite");
    }
    size_t lvl = level.value_or(ctx.top_level());
    double max_abs = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw_error(ErrorCode::NonFinite, "non-finite value in encode");
        max_abs = std::max(max_abs, std::abs(v));
    }
    double q_active = ctx.chain().modulus_product(lvl);
    if (scale * std::max(max_abs, 1.0) >= q_active / 2.0) {
        throw_error(ErrorCode::ScaleOverflow,
                    "scale x magnitude exceeds half the active modulus product");
    }
    if (replicate && !values.empty() && ctx.slot_count() % values.size() != 0) {
        throw_error(ErrorCode::DimensionMismatch,
                    "replicated block length must divide the slot count");
    }

    std::vector<double> coeffs = ctx.embed(values, scale, replicate);
    Plaintext pt;
    pt.scale = scale;
    pt.level = lvl;
    pt.poly = RnsPolynomial::zero(ctx.ring(), lvl + 1);
    for (size_t i = 0; i <= lvl; ++i) {
        const u64 q = ctx.ring()->prime(i).value;
        for (size_t k = 0; k < coeffs.size(); ++k) {
            pt.poly.rows[i][k] = reduce_double_mod(coeffs[k], q);
        }
    }
    ntt_transform(pt.poly, NttDirection::Forward);
    if (ctx.shadow_mode()) {
        std::vector<double> slots(ctx.slot_count(), 0.0);
        for (size_t j = 0; j < ctx.slot_count(); ++j) {
            if (replicate) {
                slots[j] = values.empty() ? 0.0 : values[j % values.size()];
            } else {
                slots[j] = j < values.size() ? values[j] : 0.0;
            }
        }
        pt.values = std::move(slots);
    }
    return pt;
}

std::vector<double> decode(const Plaintext& pt, const CkksContext& ctx) {
    if (!(pt.scale > 0.0)) throw_error(ErrorCode::ScaleOverflow, "plaintext scale must be > 0");
    RnsPolynomial coeff = to_form(pt.poly, PolyForm::Coeff);
    std::vector<SignedBig> composed = crt_compose(coeff);
    std::vector<double> coeffs(composed.size());
    for (size_t i = 0; i < composed.size(); ++i) coeffs[i] = composed[i].to_double();
    return ctx.unembed(coeffs, pt.scale);
}

Ciphertext encrypt(const Plaintext& pt, const PublicKey& pk, const CkksContext& ctx,
                   std::optional<uint64_t> seed) {
    uint64_t s = seed.value_or(g_encrypt_counter.fetch_add(0x9e3779b97f4a7c15ULL));
    const size_t rows = pt.level + 1;

    RnsPolynomial u = sample_ternary(ctx.ring(), rows, derive_seed(s, 1));
    ntt_transform(u, NttDirection::Forward);
    RnsPolynomial e0 = sample_gaussian(ctx.ring(), rows, ctx.noise_sigma(), derive_seed(s, 2));
    ntt_transform(e0, NttDirection::Forward);
    RnsPolynomial e1 = sample_gaussian(ctx.ring(), rows, ctx.noise_sigma(), derive_seed(s, 3));
    ntt_transform(e1, NttDirection::Forward);

    RnsPolynomial b = pk.b;
    b.truncate(rows);
    RnsPolynomial a = pk.a;
    a.truncate(rows);

    Ciphertext ct;
    ct.scale = pt.scale;
    ct.level = pt.level;
    ct.parts.resize(2);
    ct.parts[0] = poly_add(poly_add(poly_mul(b, u), e0), pt.poly);
    ct.parts[1] = poly_add(poly_mul(a, u), e1);
    if (ctx.shadow_mode()) {
        if (pt.values) {
            ct.shadow = pt.values;
        } else {
            ct.shadow = decode(pt, ctx);
        }
    }
    return ct;
}

Plaintext decrypt(const Ciphertext& ct, const SecretKey& sk, const CkksContext& ctx) {
    (void)ctx;
    if (ct.parts.size() < 2 || ct.parts.size() > 3) {
        throw_error(ErrorCode::Internal, "ciphertext must have 2 or 3 parts");
    }
    RnsPolynomial s = sk.s_ntt;
    s.truncate(ct.level + 1);
    RnsPolynomial m = poly_add(ct.parts[0], poly_mul(ct.parts[1], s));
    if (ct.parts.size() == 3) {
        RnsPolynomial s2 = sk.s_sq_ntt;
        s2.truncate(ct.level + 1);
        m = poly_add(m, poly_mul(ct.parts[2], s2));
    }
    Plaintext pt;
    pt.poly = std::move(m);
    pt.scale = ct.scale;
    pt.level = ct.level;
    return pt;
}

namespace {

void align_levels(Ciphertext& a, Ciphertext& b, const CkksContext& ctx) {
    if (a.level > b.level) a = mod_switch_to_level(a, b.level, ctx);
    if (b.level > a.level) b = mod_switch_to_level(b, a.level, ctx);
}

std::optional<std::vector<double>> combine_shadows(
    const std::optional<std::vector<double>>& x, const std::optional<std::vector<double>>& y,
    double (*op)(double, double)) {
    if (!x || !y) return std::nullopt;
    std::vector<double> out(x->size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = op((*x)[i], (*y)[i]);
    return out;
}

}  // namespace

Ciphertext add(const Ciphertext& a_in, const Ciphertext& b_in, const CkksContext& ctx) {
    Ciphertext a = a_in, b = b_in;
    align_levels(a, b, ctx);
    if (!scales_close(a.scale, b.scale)) {
        throw_error(ErrorCode::ScaleMismatch, "add: operand scales differ beyond tolerance");
    }
    if (a.parts.size() < b.parts.size()) std::swap(a, b);
    for (size_t i = 0; i < b.parts.size(); ++i) poly_add_inplace(a.parts[i], b.parts[i]);
    a.scale = std::max(a.scale, b.scale);
    a.shadow = combine_shadows(a.shadow, b.shadow, [](double x, double y) { return x + y; });
    return a;
}

Ciphertext sub(const Ciphertext& a_in, const Ciphertext& b_in, const CkksContext& ctx) {
    Ciphertext a = a_in, b = b_in;
    align_levels(a, b, ctx);
    if (!scales_close(a.scale, b.scale)) {
        throw_error(ErrorCode::ScaleMismatch, "sub: operand scales differ beyond tolerance");
    }
    if (a.parts.size() < b.parts.size()) {
        a.parts.resize(b.parts.size(), RnsPolynomial::zero(ctx.ring(), a.level + 1, PolyForm::Ntt));
    }
    for (size_t i = 0; i < b.parts.size(); ++i) poly_sub_inplace(a.parts[i], b.parts[i]);
    a.scale = std::max(a.scale, b.scale);
    a.shadow = combine_shadows(a.shadow, b.shadow, [](double x, double y) { return x - y; });
    return a;
}

Ciphertext negate(const Ciphertext& a, const CkksContext& ctx) {
    (void)ctx;
    Ciphertext out = a;
    for (auto& part : out.parts) part = poly_negate(part);
    if (out.shadow) {
        for (auto& v : *out.shadow) v = -v;
    }
    return out;
}

Ciphertext add_plain(const Ciphertext& a, const Plaintext& pt_in, const CkksContext& ctx) {
    Plaintext pt = pt_in;
    if (pt.level > a.level) pt = mod_switch_to_level(pt, a.level, ctx);
    if (pt.level != a.level) {
        throw_error(ErrorCode::LevelMismatch, "add_plain: plaintext below ciphertext level");
    }
    if (!scales_close(a.scale, pt.scale)) {
        throw_error(ErrorCode::ScaleMismatch, "add_plain: scales differ beyond tolerance");
    }
    Ciphertext out = a;
    poly_add_inplace(out.parts[0], pt.poly);
    if (out.shadow && pt.values) {
        for (size_t i = 0; i < out.shadow->size(); ++i) (*out.shadow)[i] += (*pt.values)[i];
    }
    return out;
}

Ciphertext multiply(const Ciphertext& a_in, const Ciphertext& b_in, const CkksContext& ctx) {
    Ciphertext a = a_in, b = b_in;
    align_levels(a, b, ctx);
    if (a.level < 1) {
        throw_error(ErrorCode::LevelExhausted,
                    "multiply needs a remaining prime below the current level for the "
                    "subsequent rescale");
    }
    if (a.scale * b.scale >= ctx.chain().modulus_product(a.level)) {
        throw_error(ErrorCode::ScaleOverflow,
                    "product scale reaches the active coefficient modulus");
    }
    if (a.parts.size() != 2 || b.parts.size() != 2) {
        throw_error(ErrorCode::Internal, "multiply expects relinearized (2-part) operands");
    }
    Ciphertext out;
    out.level = a.level;
    out.scale = a.scale * b.scale;
    out.parts.resize(3);
    out.parts[0] = poly_mul(a.parts[0], b.parts[0]);
    out.parts[1] = poly_mul(a.parts[0], b.parts[1]);
    poly_mul_accumulate(out.parts[1], a.parts[1], b.parts[0]);
    out.parts[2] = poly_mul(a.parts[1], b.parts[1]);
    out.shadow = combine_shadows(a.shadow, b.shadow, [](double x, double y) { return x * y; });
    return out;
}

Ciphertext multiply_plain(const Ciphertext& a, const Plaintext& pt_in, const CkksContext& ctx) {
    Plaintext pt = pt_in;
    if (pt.level > a.level) pt = mod_switch_to_level(pt, a.level, ctx);
    if (pt.level != a.level) {
        throw_error(ErrorCode::LevelMismatch, "multiply_plain: plaintext below ciphertext level");
    }
    Ciphertext out = a;
    for (auto& part : out.parts) part = poly_mul(part, pt.poly);
    out.scale = a.scale * pt.scale;
    if (out.shadow && pt.values) {
        for (size_t i = 0; i < out.shadow->size(); ++i) (*out.shadow)[i] *= (*pt.values)[i];
    }
    return out;
}

Ciphertext relinearize(const Ciphertext& ct, const RelinKey& rk, const CkksContext& ctx) {
    if (ct.parts.size() == 2) return ct;
    if (ct.parts.size() != 3) {
        throw_error(ErrorCode::Internal, "relinearize expects a 3-part ciphertext");
    }
    auto [d0, d1] = switch_key(ct.parts[2], rk.key, ctx);
    Ciphertext out;
    out.scale = ct.scale;
    out.level = ct.level;
    out.shadow = ct.shadow;
    out.parts.resize(2);
    out.parts[0] = poly_add(ct.parts[0], d0);
    out.parts[1] = poly_add(ct.parts[1], d1);
    return out;
}

Ciphertext rescale(const Ciphertext& ct, const CkksContext& ctx) {
    if (ct.level < 1) {
        throw_error(ErrorCode::LevelExhausted, "rescale at level 0");
    }
    const size_t drop = ct.level;  // row index of the dropped prime
    const u64 q = ctx.ring()->prime(drop).value;
    const u64 half_q = (q - 1) / 2;

    Ciphertext out;
    out.level = ct.level - 1;
    out.shadow = ct.shadow;
    double exact = ct.scale / static_cast<double>(q);
    out.scale = ctx.scale_policy() == ScalePolicy::SnapToGlobal ? ctx.global_scale() : exact;
    out.parts.reserve(ct.parts.size());
    for (const auto& part : ct.parts) {
        RnsPolynomial p = to_form(part, PolyForm::Coeff);
        std::vector<u64>& last = p.rows[drop];
        for (auto& v : last) v = add_mod(v, half_q, q);
        RnsPolynomial reduced = RnsPolynomial::zero(ctx.ring(), drop);
        for (size_t m = 0; m < drop; ++m) {
            const u64 qm = ctx.ring()->prime(m).value;
            const u64 half_mod = half_q % qm;
            const u64 q_inv = pow_mod(q % qm, qm - 2, qm);
            const u64* src = p.rows[m].data();
            u64* dst = reduced.rows[m].data();
            for (size_t i = 0; i < p.degree(); ++i) {
                u64 v = add_mod(src[i], half_mod, qm);
                u64 t = last[i] % qm;
                dst[i] = mul_mod(sub_mod(v, t, qm), q_inv, qm);
            }
        }
        ntt_transform(reduced, NttDirection::Forward);
        out.parts.push_back(std::move(reduced));
    }
    return out;
}

Ciphertext mod_switch_to_level(const Ciphertext& ct, size_t level, const CkksContext& ctx) {
    (void)ctx;
    if (level > ct.level) {
        throw_error(ErrorCode::LevelMismatch, "cannot switch a ciphertext upward");
    }
    Ciphertext out = ct;
    out.level = level;
    for (auto& part : out.parts) part.truncate(level + 1);
    return out;
}

Plaintext mod_switch_to_level(const Plaintext& pt, size_t level, const CkksContext& ctx) {
    (void)ctx;
    if (level > pt.level) {
        throw_error(ErrorCode::LevelMismatch, "cannot switch a plaintext upward");
    }
    Plaintext out = pt;
    out.level = level;
    out.poly.truncate(level + 1);
    return out;
}

Ciphertext rotate(const Ciphertext& ct, int64_t k, const GaloisKeys& gk, const CkksContext& ctx) {
    if (ct.parts.size() != 2) {
        throw_error(ErrorCode::Internal, "rotate expects a relinearized ciphertext");
    }
    int64_t slots = static_cast<int64_t>(ctx.slot_count());
    int64_t r = ((k % slots) + slots) % slots;
    if (r == 0) return ct;
    auto it = gk.steps.find(k);
    uint64_t element;
    if (it != gk.steps.end()) {
        element = it->second;
    } else {
        element = ctx.galois_element(k);
        if (gk.keys.count(element) == 0) {
            throw_error(ErrorCode::MissingGaloisKey,
                        "no galois key for rotation step " + std::to_string(k));
        }
    }
    const KswitchKey& key = gk.keys.at(element);

    RnsPolynomial c0 = to_form(ct.parts[0], PolyForm::Coeff);
    RnsPolynomial c1 = to_form(ct.parts[1], PolyForm::Coeff);
    RnsPolynomial r0 = apply_automorphism(c0, element);
    RnsPolynomial r1 = apply_automorphism(c1, element);
    ntt_transform(r0, NttDirection::Forward);
    ntt_transform(r1, NttDirection::Forward);

    auto [d0, d1] = switch_key(r1, key, ctx);
    Ciphertext out;
    out.scale = ct.scale;
    out.level = ct.level;
    out.parts.resize(2);
    out.parts[0] = poly_add(r0, d0);
    out.parts[1] = std::move(d1);
    if (ct.shadow) {
        std::vector<double> rotated(ct.shadow->size());
        for (size_t j = 0; j < rotated.size(); ++j) {
            rotated[j] = (*ct.shadow)[(j + static_cast<size_t>(r)) % rotated.size()];
        }
        out.shadow = std::move(rotated);
    }
    return out;
}

Ciphertext dot(const Ciphertext& a, const Ciphertext& b, size_t len, const GaloisKeys& gk,
               const RelinKey& rk, const CkksContext& ctx) {
    if (len > ctx.slot_count()) {
        throw_error(ErrorCode::TooManySlots, "dot length exceeds slot count");
    }
    Ciphertext c = rescale(relinearize(multiply(a, b, ctx), rk, ctx), ctx);
    for (size_t step = next_pow2(len) / 2; step >= 1; step >>= 1) {
        c = add(c, rotate(c, static_cast<int64_t>(step), gk, ctx), ctx);
    }
    return c;
}

Ciphertext polyval(const Ciphertext& ct, const std::vector<double>& coeffs, const RelinKey& rk,
                   const CkksContext& ctx) {
    std::vector<double> c = coeffs;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.size() > 4) {
        throw_error(ErrorCode::DegreeUnsupported, "polyval supports degree <= 3");
    }
    size_t deg = c.empty() ? 0 : c.size() - 1;
    c.resize(4, 0.0);
    const double c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3];

    size_t needed = deg >= 2 ? 2 : 1;
    if (ct.level < needed) {
        throw_error(ErrorCode::LevelExhausted, "polyval needs " + std::to_string(needed) +
                                                   " levels below the input");
    }
    const double s = ct.scale;
    const double q_l = static_cast<double>(ctx.ring()->prime(ct.level).value);

    if (deg <= 1) {
        // c1 x at one level down, then the constant.
        Plaintext p1 = encode(std::vector<double>(1, c1), s, ctx, true, ct.level);
        Ciphertext t1 = rescale(multiply_plain(ct, p1, ctx), ctx);
        Plaintext p0 = encode(std::vector<double>(1, c0), t1.scale, ctx, true, t1.level);
        return add_plain(t1, p0, ctx);
    }

    const double q_l1 = static_cast<double>(ctx.ring()->prime(ct.level - 1).value);

    // x^2 and c3 x at level-1, matched scales.
    Ciphertext x2 = rescale(relinearize(multiply(ct, ct, ctx), rk, ctx), ctx);
    Ciphertext acc;
    bool have_acc = false;
    double target;
    if (ctx.scale_policy() == ScalePolicy::SnapToGlobal) {
        target = ctx.global_scale();
    } else {
        target = (s * s / q_l) * (s * s / q_l) / q_l1;
    }

    if (c3 != 0.0) {
        Plaintext p3 = encode(std::vector<double>(1, c3), s, ctx, true, ct.level);
        Ciphertext t3 = rescale(multiply_plain(ct, p3, ctx), ctx);
        acc = rescale(relinearize(multiply(x2, t3, ctx), rk, ctx), ctx);
        have_acc = true;
    }
    if (c2 != 0.0) {
        double sigma2 = ctx.scale_policy() == ScalePolicy::SnapToGlobal
                            ? target * q_l1 / x2.scale
                            : x2.scale;
        Plaintext p2 = encode(std::vector<double>(1, c2), sigma2, ctx, true, x2.level);
        Ciphertext t2 = rescale(multiply_plain(x2, p2, ctx), ctx);
        acc = have_acc ? add(acc, t2, ctx) : t2;
        have_acc = true;
    }
    {
        // c1 x rescaled once, then switched down to the accumulator level.
        double sigma1 = ctx.scale_policy() == ScalePolicy::SnapToGlobal
                            ? ctx.global_scale()
                            : target * q_l / s;
        Plaintext p1 = encode(std::vector<double>(1, c1), sigma1, ctx, true, ct.level);
        Ciphertext t1 = mod_switch_to_level(rescale(multiply_plain(ct, p1, ctx), ctx),
                                            ct.level - 2, ctx);
        acc = have_acc ? add(acc, t1, ctx) : t1;
    }
    Plaintext p0 = encode(std::vector<double>(1, c0), acc.scale, ctx, true, acc.level);
    return add_plain(acc, p0, ctx);
}

std::vector<Ciphertext> encrypt_matrix_rows(const std::vector<std::vector<double>>& matrix,
                                            RowPacking packing, const PublicKey& pk,
                                            const CkksContext& ctx, uint64_t seed) {
    std::vector<Ciphertext> rows;
    rows.reserve(matrix.size());
    for (size_t i = 0; i < matrix.size(); ++i) {
        std::vector<double> packed = matrix[i];
        if (packing == RowPacking::DoubledRow) {
            packed.insert(packed.end(), matrix[i].begin(), matrix[i].end());
        }
        Plaintext pt = encode(packed, ctx.global_scale(), ctx);
        rows.push_back(encrypt(pt, pk, ctx, derive_seed(seed, 0xabc, i)));
    }
    return rows;
}

std::vector<Ciphertext> matmul_plain(const std::vector<Ciphertext>& enc_a_rows,
                                     const std::vector<std::vector<double>>& b,
                                     const GaloisKeys& gk, const CkksContext& ctx) {
    const size_t s = b.size();
    if (s == 0 || enc_a_rows.empty()) {
        throw_error(ErrorCode::DimensionMismatch, "matmul with empty operands");
    }
    for (const auto& row : b) {
        if (row.size() != s) {
            throw_error(ErrorCode::DimensionMismatch, "B must be square");
        }
    }
    if (2 * s > ctx.slot_count()) {
        throw_error(ErrorCode::DimensionTooLarge, "matrix side exceeds slot capacity");
    }

    // Diagonal method: row_i(A B)[j] = sum_k rot(A_i, k)[j] * B[(j+k) mod s][j].
    std::vector<std::vector<double>> diagonals(s, std::vector<double>(s));
    for (size_t k = 0; k < s; ++k) {
        for (size_t j = 0; j < s; ++j) diagonals[k][j] = b[(j + k) % s][j];
    }

    std::vector<Ciphertext> result;
    result.reserve(enc_a_rows.size());
    for (const auto& enc_row : enc_a_rows) {
        Ciphertext rotated = enc_row;
        Ciphertext acc;
        for (size_t k = 0; k < s; ++k) {
            if (k > 0) rotated = rotate(rotated, 1, gk, ctx);
            Plaintext diag = encode(diagonals[k], ctx.global_scale(), ctx, false, rotated.level);
            Ciphertext term = multiply_plain(rotated, diag, ctx);
            acc = (k == 0) ? term : add(acc, term, ctx);
        }
        result.push_back(rescale(acc, ctx));
    }
    return result;
}

std::vector<std::vector<Ciphertext>> matmul_ct(const std::vector<Ciphertext>& enc_a_rows,
                                               const std::vector<Ciphertext>& enc_b_cols,
                                               size_t inner_len, const GaloisKeys& gk,
                                               const RelinKey& rk, const CkksContext& ctx) {
    std::vector<std::vector<Ciphertext>> grid(enc_a_rows.size());
    for (size_t i = 0; i < enc_a_rows.size(); ++i) {
        grid[i].reserve(enc_b_cols.size());
        for (size_t j = 0; j < enc_b_cols.size(); ++j) {
            grid[i].push_back(dot(enc_a_rows[i], enc_b_cols[j], inner_len, gk, rk, ctx));
        }
    }
    return grid;
}

NoiseReport noise_report(const Ciphertext& ct, const SecretKey& sk, const CkksContext& ctx) {
    if (!ct.shadow) {
        throw_error(ErrorCode::ShadowUnavailable,
                    "noise_report needs a shadow plaintext (enable shadow mode)");
    }
    std::vector<double> observed = decode(decrypt(ct, sk, ctx), ctx);
    const std::vector<double>& shadow = *ct.shadow;
    NoiseReport report;
    report.level = ct.level;
    report.exact_scale = ct.scale;
    report.remaining_primes = ct.level + 1;
    double sum = 0.0;
    for (size_t j = 0; j < observed.size(); ++j) {
        double err = std::abs(observed[j] - shadow[j]);
        report.max_error = std::max(report.max_error, err);
        sum += err;
    }
    report.mean_error = observed.empty() ? 0.0 : sum / static_cast<double>(observed.size());
    return report;
}

}  // namespace ckks
