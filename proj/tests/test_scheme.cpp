// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "ckkslab/rng.hpp"
#include "ckkslab/scheme.hpp"

using namespace ckks;

namespace {

std::shared_ptr<const CkksContext> default_ctx(ScalePolicy policy = ScalePolicy::Exact,
                                               bool shadow = false) {
    ContextOptions opt;
    opt.scale_policy = policy;
    opt.shadow_mode = shadow;
    return CkksContext::create(preset_by_name("n8192_b200_s40"), opt);
}

std::vector<double> random_vector(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_symmetric();
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, size_t n) {
    double m = 0.0;
    for (size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("validate_params accepts the Table presets and flags the boundary row") {
    auto r200 = validate_params(preset_by_name("n8192_b200_s40"));
    CHECK(r200.ok);
    bool insecure = false;
    for (const auto& w : r200.warnings) {
        if (w.find("Insecure") != std::string::npos) insecure = true;
    }
    CHECK_FALSE(insecure);

    auto r54 = validate_params(preset_by_name("n2048_b54_s16"));
    bool boundary = false;
    for (const auto& w : r54.warnings) {
        if (w.find("security boundary") != std::string::npos) boundary = true;
    }
    CHECK(boundary);
}

TEST_CASE("validate_params rejects a non-power-of-two degree") {
    CkksParams p;
    p.poly_modulus_degree = 3000;
    CHECK_THROWS_AS(validate_params(p), CkksError);
}

TEST_CASE("validate_params warns when the scale dwarfs the rescaling primes") {
    auto r = validate_params(preset_by_name("n8192_b206_s40"));
    REQUIRE_FALSE(r.warnings.empty());
    bool scale_warning = false;
    for (const auto& w : r.warnings) {
        if (w.find("nominal scale") != std::string::npos) scale_warning = true;
    }
    CHECK(scale_warning);
}

TEST_CASE("encode/decode round-trip: zero vector is exact") {
    auto ctx = default_ctx();
    Plaintext pt = encode({}, ctx->global_scale(), *ctx);
    auto back = decode(pt, *ctx);
    for (double v : back) CHECK(v == 0.0);
}

TEST_CASE("encode/decode round-trip error stays below 1e-6 at scale 2^40") {
    auto ctx = default_ctx();
    auto values = random_vector(4096, 17);
    Plaintext pt = encode(values, ctx->global_scale(), *ctx);
    auto back = decode(pt, *ctx);
    CHECK(max_abs_diff(values, back, values.size()) < 1e-6);
}

TEST_CASE("decode of a two-value encode recovers the inputs") {
    auto ctx = default_ctx();
    Plaintext pt = encode({0.5, -0.25}, std::ldexp(1.0, 30), *ctx);
    auto back = decode(pt, *ctx);
    CHECK(back[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(back[1] == doctest::Approx(-0.25).epsilon(1e-6));
}

TEST_CASE("encode linearity within twice the round-trip error") {
    auto ctx = default_ctx();
    auto u = random_vector(64, 3);
    auto v = random_vector(64, 4);
    Plaintext pu = encode(u, ctx->global_scale(), *ctx);
    Plaintext pv = encode(v, ctx->global_scale(), *ctx);
    Plaintext psum;
    psum.poly = poly_add(pu.poly, pv.poly);
    psum.scale = pu.scale;
    psum.level = pu.level;
    auto back = decode(psum, *ctx);
    for (size_t i = 0; i < 64; ++i) {
        CHECK(std::abs(back[i] - (u[i] + v[i])) < 2e-6);
    }
}

TEST_CASE("encode scale invariance across 2^30 and 2^40") {
    auto ctx = default_ctx();
    auto v = random_vector(128, 9);
    auto a = decode(encode(v, std::ldexp(1.0, 30), *ctx), *ctx);
    auto b = decode(encode(v, std::ldexp(1.0, 40), *ctx), *ctx);
    CHECK(max_abs_diff(a, b, 128) < 2e-6);
}

TEST_CASE("encode rejects too many values and non-finite input") {
    auto ctx = default_ctx();
    std::vector<double> too_many(ctx->slot_count() + 1, 0.1);
    CHECK_THROWS_AS(encode(too_many, ctx->global_scale(), *ctx), CkksError);
    CHECK_THROWS_AS(encode({std::nan("")}, ctx->global_scale(), *ctx), CkksError);
    CHECK_THROWS_AS(encode({0.5}, std::ldexp(1.0, 200), *ctx), CkksError);
}

TEST_CASE("fresh encrypt/decrypt recovers the vector below 1e-6") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 42);
    auto values = random_vector(4096, 5);
    Plaintext pt = encode(values, ctx->global_scale(), *ctx);
    Ciphertext ct = encrypt(pt, kp.public_key, *ctx, 1001);
    auto back = decode(decrypt(ct, kp.secret, *ctx), *ctx);
    CHECK(max_abs_diff(values, back, values.size()) < 1e-6);
}

TEST_CASE("encrypting the zero vector decrypts to near-zero everywhere") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 7);
    Ciphertext ct = encrypt(encode({}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 8);
    auto back = decode(decrypt(ct, kp.secret, *ctx), *ctx);
    for (double v : back) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("keygen is deterministic per seed") {
    auto ctx = default_ctx();
    auto kp1 = keygen(*ctx, 99);
    auto kp2 = keygen(*ctx, 99);
    CHECK(kp1.secret.s_coeff.rows == kp2.secret.s_coeff.rows);
    CHECK(kp1.public_key.a.rows == kp2.public_key.a.rows);
    CHECK(kp1.public_key.b.rows == kp2.public_key.b.rows);
}

TEST_CASE("decrypting with the wrong key yields garbage") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 1);
    auto other = keygen(*ctx, 2);
    auto values = random_vector(32, 6);
    Ciphertext ct = encrypt(encode(values, ctx->global_scale(), *ctx), kp.public_key, *ctx, 3);
    auto back = decode(decrypt(ct, other.secret, *ctx), *ctx);
    CHECK(max_abs_diff(values, back, 32) > 0.1);
}

TEST_CASE("add/sub/negate behave slotwise") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 11);
    auto u = random_vector(100, 21);
    auto v = random_vector(100, 22);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 31);
    Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 32);

    auto sum = decode(decrypt(add(cu, cv, *ctx), kp.secret, *ctx), *ctx);
    auto diff = decode(decrypt(sub(cu, cv, *ctx), kp.secret, *ctx), *ctx);
    auto neg = decode(decrypt(negate(cu, *ctx), kp.secret, *ctx), *ctx);
    for (size_t i = 0; i < 100; ++i) {
        CHECK(std::abs(sum[i] - (u[i] + v[i])) < 1e-5);
        CHECK(std::abs(diff[i] - (u[i] - v[i])) < 1e-5);
        CHECK(std::abs(neg[i] + u[i]) < 1e-5);
    }
}

TEST_CASE("a - a cancels exactly") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 12);
    auto u = random_vector(64, 23);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 33);
    auto zero = decode(decrypt(sub(cu, cu, *ctx), kp.secret, *ctx), *ctx);
    for (double v : zero) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("adding an encryption of zero is the identity within fresh noise") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 13);
    auto u = random_vector(64, 24);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 34);
    Ciphertext cz = encrypt(encode({}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 35);
    auto back = decode(decrypt(add(cu, cz, *ctx), kp.secret, *ctx), *ctx);
    CHECK(max_abs_diff(u, back, 64) < 2e-6);
}

TEST_CASE("add refuses scales that differ beyond tolerance") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 14);
    Ciphertext a = encrypt(encode({0.1}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 41);
    Ciphertext b =
        encrypt(encode({0.2}, ctx->global_scale() * 1.001, *ctx), kp.public_key, *ctx, 42);
    CHECK_THROWS_AS(add(a, b, *ctx), CkksError);
}

TEST_CASE("multiply + relinearize + rescale computes the slotwise product") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 15);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto u = random_vector(100, 25);
    auto v = random_vector(100, 26);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 51);
    Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 52);
    Ciphertext prod = rescale(relinearize(multiply(cu, cv, *ctx), rk, *ctx), *ctx);
    CHECK(prod.part_count() == 2);
    CHECK(prod.level == cu.level - 1);
    auto back = decode(decrypt(prod, kp.secret, *ctx), *ctx);
    for (size_t i = 0; i < 100; ++i) {
        CHECK(std::abs(back[i] - u[i] * v[i]) < 1e-4);
    }
}

TEST_CASE("3-part ciphertexts decrypt without relinearization") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 16);
    auto u = random_vector(50, 27);
    auto v = random_vector(50, 28);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 61);
    Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 62);
    Ciphertext raw = multiply(cu, cv, *ctx);
    CHECK(raw.part_count() == 3);
    auto back = decode(decrypt(raw, kp.secret, *ctx), *ctx);
    for (size_t i = 0; i < 50; ++i) {
        CHECK(std::abs(back[i] - u[i] * v[i]) < 1e-4);
    }
}

TEST_CASE("multiply by an encryption of ones then rescale is the identity") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 17);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto u = random_vector(64, 29);
    std::vector<double> ones(64, 1.0);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 71);
    Ciphertext c1 = encrypt(encode(ones, ctx->global_scale(), *ctx), kp.public_key, *ctx, 72);
    Ciphertext prod = rescale(relinearize(multiply(cu, c1, *ctx), rk, *ctx), *ctx);
    auto back = decode(decrypt(prod, kp.secret, *ctx), *ctx);
    CHECK(max_abs_diff(u, back, 64) < 1e-4);
}

TEST_CASE("exact-scale bookkeeping through multiply and rescale") {
    auto ctx = default_ctx(ScalePolicy::Exact);
    auto kp = keygen(*ctx, 18);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto u = random_vector(16, 30);
    double scale = ctx->global_scale();
    Ciphertext cu = encrypt(encode(u, scale, *ctx), kp.public_key, *ctx, 81);
    Ciphertext sq = multiply(cu, cu, *ctx);
    CHECK(sq.scale == scale * scale);
    Ciphertext re = rescale(relinearize(sq, rk, *ctx), *ctx);
    double dropped = static_cast<double>(ctx->ring()->prime(cu.level).value);
    CHECK(re.scale == (scale * scale) / dropped);
    // within relative 2^-20 of the nominal scale
    CHECK(std::abs(re.scale - scale) / scale < 0x1.0p-20);
}

TEST_CASE("snap-to-global policy pins the scale after rescale") {
    auto ctx = default_ctx(ScalePolicy::SnapToGlobal);
    auto kp = keygen(*ctx, 19);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto u = random_vector(16, 31);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 91);
    Ciphertext re = rescale(relinearize(multiply(cu, cu, *ctx), rk, *ctx), *ctx);
    CHECK(re.scale == ctx->global_scale());
    auto back = decode(decrypt(re, kp.secret, *ctx), *ctx);
    for (size_t i = 0; i < 16; ++i) {
        CHECK(std::abs(back[i] - u[i] * u[i]) < 1e-4);
    }
}

TEST_CASE("rescale value preservation and depth budget") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 20);
    auto u = random_vector(32, 32);
    // Encode at scale^2 so one rescale still leaves ~2^40 of precision: the
    // value is preserved, the precision budget shrinks.
    double big = ctx->global_scale() * ctx->global_scale();
    Ciphertext cu = encrypt(encode(u, big, *ctx), kp.public_key, *ctx, 101);
    Ciphertext r1 = rescale(cu, *ctx);
    CHECK(r1.scale == doctest::Approx(ctx->global_scale()).epsilon(1e-5));
    auto back = decode(decrypt(r1, kp.secret, *ctx), *ctx);
    CHECK(max_abs_diff(u, back, 32) < 1e-4);
    Ciphertext r2 = rescale(r1, *ctx);
    CHECK(r2.level == 0);
    CHECK_THROWS_AS(rescale(r2, *ctx), CkksError);
}

TEST_CASE("depth budget equals the middle-prime count") {
    // [60,40,40,60]: two middles, so exactly two multiplies.
    auto ctx = default_ctx(ScalePolicy::SnapToGlobal);
    auto kp = keygen(*ctx, 21);
    auto rk = gen_relin_key(kp.secret, *ctx);
    std::vector<double> v(8, 0.9);
    Ciphertext c = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 111);
    for (int depth = 0; depth < 2; ++depth) {
        c = rescale(relinearize(multiply(c, c, *ctx), rk, *ctx), *ctx);
    }
    CHECK(c.level == 0);
    CHECK_THROWS_AS(multiply(c, c, *ctx), CkksError);
    try {
        multiply(c, c, *ctx);
    } catch (const CkksError& e) {
        CHECK(e.code() == ErrorCode::LevelExhausted);
    }
}

TEST_CASE("single-prime chains cannot multiply or make relin keys") {
    ContextOptions opt;
    auto ctx = CkksContext::create(preset_by_name("n2048_b54_s16"), opt);
    auto kp = keygen(*ctx, 22);
    CHECK_THROWS_AS(gen_relin_key(kp.secret, *ctx), CkksError);
    std::vector<double> v(4, 0.5);
    Ciphertext c = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 112);
    CHECK(c.level == 0);
    CHECK_THROWS_AS(multiply(c, c, *ctx), CkksError);
    // Addition still evaluates on the single prime. The 2^16 scale leaves no
    // decimal precision (the Table-1 configuration this preset mirrors
    // reports 0.0 matching decimals), so only coarse recovery is asserted.
    auto sum = decode(decrypt(add(c, c, *ctx), kp.secret, *ctx), *ctx);
    CHECK(std::abs(sum[0] - 1.0) < 5.0);
}

TEST_CASE("rotate shifts slots left and composes with its inverse") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 23);
    auto gk = gen_galois_keys(kp.secret, {1, -1, 4}, *ctx);
    std::vector<double> v(ctx->slot_count(), 0.0);
    v[0] = 1, v[1] = 2, v[2] = 3, v[3] = 4;
    Ciphertext c = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 121);

    CHECK(rotate(c, 0, gk, *ctx).parts == c.parts);

    auto left1 = decode(decrypt(rotate(c, 1, gk, *ctx), kp.secret, *ctx), *ctx);
    CHECK(std::abs(left1[0] - 2.0) < 1e-4);
    CHECK(std::abs(left1[1] - 3.0) < 1e-4);
    CHECK(std::abs(left1[2] - 4.0) < 1e-4);
    CHECK(std::abs(left1[3] - 0.0) < 1e-4);
    // slot 0 wraps to the end of the slot ring
    CHECK(std::abs(left1[ctx->slot_count() - 1] - 1.0) < 1e-4);

    auto round = decode(
        decrypt(rotate(rotate(c, 1, gk, *ctx), -1, gk, *ctx), kp.secret, *ctx), *ctx);
    for (size_t i = 0; i < 8; ++i) CHECK(std::abs(round[i] - v[i]) < 1e-4);

    CHECK_THROWS_AS(rotate(c, 3, gk, *ctx), CkksError);
}

TEST_CASE("dot computes inner products") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 24);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto gk = gen_galois_keys(kp.secret, {1, 2, 4, 8}, *ctx);

    SUBCASE("hand example of length 4") {
        std::vector<double> u{0.1, 0.2, 0.3, 0.4};
        std::vector<double> v{0.4, 0.3, 0.2, 0.1};
        Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 131);
        Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 132);
        auto out = decode(decrypt(dot(cu, cv, 4, gk, rk, *ctx), kp.secret, *ctx), *ctx);
        CHECK(std::abs(out[0] - 0.20) < 1e-4);
    }

    SUBCASE("dot with the zero vector is zero") {
        std::vector<double> u{0.5, -0.5, 0.25, 0.75};
        Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 133);
        Ciphertext cz = encrypt(encode({}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 134);
        auto out = decode(decrypt(dot(cu, cz, 4, gk, rk, *ctx), kp.secret, *ctx), *ctx);
        CHECK(std::abs(out[0]) < 1e-4);
    }

    SUBCASE("random length-16 dot stays within 1e-3") {
        Rng rng(77);
        std::vector<double> u(16), v(16);
        for (auto& x : u) x = rng.next_symmetric();
        for (auto& x : v) x = rng.next_symmetric();
        double expected = 0;
        for (size_t i = 0; i < 16; ++i) expected += u[i] * v[i];
        Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 135);
        Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 136);
        auto out = decode(decrypt(dot(cu, cv, 16, gk, rk, *ctx), kp.secret, *ctx), *ctx);
        CHECK(std::abs(out[0] - expected) < 1e-3);
    }

    SUBCASE("replicated packing broadcasts the sum to every slot") {
        std::vector<double> u{0.1, 0.2, 0.3, 0.4};
        std::vector<double> v{0.4, 0.3, 0.2, 0.1};
        Ciphertext cu =
            encrypt(encode(u, ctx->global_scale(), *ctx, true), kp.public_key, *ctx, 137);
        Ciphertext cv =
            encrypt(encode(v, ctx->global_scale(), *ctx, true), kp.public_key, *ctx, 138);
        auto out = decode(decrypt(dot(cu, cv, 4, gk, rk, *ctx), kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 64; ++j) CHECK(std::abs(out[j] - 0.20) < 1e-4);
    }
}

TEST_CASE("polyval of the activation coefficients") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 25);
    auto rk = gen_relin_key(kp.secret, *ctx);
    const std::vector<double> sig{0.5, 0.197, 0.0, -0.004};

    SUBCASE("constant term at x = 0") {
        Ciphertext cz = encrypt(encode({}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 141);
        auto out = decode(decrypt(polyval(cz, sig, rk, *ctx), kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 16; ++j) CHECK(std::abs(out[j] - 0.5) < 1e-3);
    }

    SUBCASE("x = 1 evaluates to 0.693") {
        std::vector<double> ones(8, 1.0);
        Ciphertext c = encrypt(encode(ones, ctx->global_scale(), *ctx), kp.public_key, *ctx, 142);
        auto out = decode(decrypt(polyval(c, sig, rk, *ctx), kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 8; ++j) CHECK(std::abs(out[j] - 0.693) < 1e-3);
    }

    SUBCASE("identity polynomial returns the input") {
        auto v = random_vector(32, 55);
        Ciphertext c = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 143);
        auto out = decode(decrypt(polyval(c, {0.0, 1.0}, rk, *ctx), kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 32; ++j) CHECK(std::abs(out[j] - v[j]) < 1e-3);
    }

    SUBCASE("degree above 3 is rejected") {
        Ciphertext c = encrypt(encode({0.5}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 144);
        CHECK_THROWS_AS(polyval(c, {0, 0, 0, 0, 1.0}, rk, *ctx), CkksError);
    }

    SUBCASE("matches the plain cubic on random inputs") {
        auto v = random_vector(64, 56);
        Ciphertext c = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 145);
        auto out = decode(decrypt(polyval(c, sig, rk, *ctx), kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 64; ++j) {
            double want = 0.5 + 0.197 * v[j] - 0.004 * v[j] * v[j] * v[j];
            CHECK(std::abs(out[j] - want) < 1e-3);
        }
    }
}

TEST_CASE("matmul_plain: identity times B returns B") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 26);
    auto gk = gen_galois_keys(kp.secret, {1}, *ctx);
    const size_t s = 4;
    std::vector<std::vector<double>> eye(s, std::vector<double>(s, 0.0));
    for (size_t i = 0; i < s; ++i) eye[i][i] = 1.0;
    std::vector<std::vector<double>> b{{0.5, 0.6, -0.1, 0.2},
                                       {0.7, 0.8, 0.3, -0.4},
                                       {0.05, -0.15, 0.25, 0.35},
                                       {-0.6, 0.1, 0.45, -0.2}};
    auto enc = encrypt_matrix_rows(eye, RowPacking::DoubledRow, kp.public_key, *ctx, 900);
    auto rows = matmul_plain(enc, b, gk, *ctx);
    for (size_t i = 0; i < s; ++i) {
        auto out = decode(decrypt(rows[i], kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < s; ++j) CHECK(std::abs(out[j] - b[i][j]) < 1e-4);
    }
}

TEST_CASE("matmul_plain: worked 2x2 example") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 27);
    auto gk = gen_galois_keys(kp.secret, {1}, *ctx);
    std::vector<std::vector<double>> a{{0.1, 0.2}, {0.3, 0.4}};
    std::vector<std::vector<double>> b{{0.5, 0.6}, {0.7, 0.8}};
    auto enc = encrypt_matrix_rows(a, RowPacking::DoubledRow, kp.public_key, *ctx, 901);
    auto rows = matmul_plain(enc, b, gk, *ctx);
    std::vector<std::vector<double>> expected{{0.19, 0.22}, {0.43, 0.50}};
    for (size_t i = 0; i < 2; ++i) {
        auto out = decode(decrypt(rows[i], kp.secret, *ctx), *ctx);
        for (size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(out[j] - expected[i][j]) < 1e-4);
        }
    }
}

TEST_CASE("matmul_ct matches the plain product entrywise") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 28);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto gk = gen_galois_keys(kp.secret, {1, 2}, *ctx);
    std::vector<std::vector<double>> a{{0.1, 0.2}, {0.3, 0.4}};
    std::vector<std::vector<double>> bt{{0.5, 0.7}, {0.6, 0.8}};  // columns of B
    auto enc_a = encrypt_matrix_rows(a, RowPacking::ZeroPad, kp.public_key, *ctx, 902);
    auto enc_b = encrypt_matrix_rows(bt, RowPacking::ZeroPad, kp.public_key, *ctx, 903);
    auto grid = matmul_ct(enc_a, enc_b, 2, gk, rk, *ctx);
    std::vector<std::vector<double>> expected{{0.19, 0.22}, {0.43, 0.50}};
    for (size_t i = 0; i < 2; ++i) {
        for (size_t j = 0; j < 2; ++j) {
            auto out = decode(decrypt(grid[i][j], kp.secret, *ctx), *ctx);
            CHECK(std::abs(out[0] - expected[i][j]) < 1e-3);
        }
    }
}

TEST_CASE("noise_report observes fresh and grown noise") {
    auto ctx = default_ctx(ScalePolicy::Exact, true);
    auto kp = keygen(*ctx, 29);
    auto rk = gen_relin_key(kp.secret, *ctx);
    auto u = random_vector(128, 60);
    auto v = random_vector(128, 61);
    Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 151);
    Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 152);

    auto fresh = noise_report(cu, kp.secret, *ctx);
    CHECK(fresh.max_error < 1e-6);
    CHECK(fresh.remaining_primes == 3);
    CHECK(fresh.exact_scale == ctx->global_scale());

    // Multiply by an encryption of ones: the carried error survives intact
    // and the ones-ciphertext noise lands on top, so the observed error
    // strictly grows through multiply+rescale.
    std::vector<double> ones_v(ctx->slot_count(), 1.0);
    Ciphertext ones =
        encrypt(encode(ones_v, ctx->global_scale(), *ctx), kp.public_key, *ctx, 155);
    Ciphertext prod = rescale(relinearize(multiply(cu, ones, *ctx), rk, *ctx), *ctx);
    auto grown = noise_report(prod, kp.secret, *ctx);
    CHECK(grown.mean_error > fresh.mean_error);
    CHECK(grown.remaining_primes == 2);
    (void)cv;

    // shadow soundness: recompute the comparison independently
    auto observed = decode(decrypt(prod, kp.secret, *ctx), *ctx);
    double max_err = 0;
    for (size_t j = 0; j < observed.size(); ++j) {
        max_err = std::max(max_err, std::abs(observed[j] - (*prod.shadow)[j]));
    }
    CHECK(grown.max_error == doctest::Approx(max_err));
}

TEST_CASE("noise_report without shadow raises ShadowUnavailable") {
    auto ctx = default_ctx(ScalePolicy::Exact, false);
    auto kp = keygen(*ctx, 30);
    Ciphertext c = encrypt(encode({0.1}, ctx->global_scale(), *ctx), kp.public_key, *ctx, 153);
    CHECK_THROWS_AS(noise_report(c, kp.secret, *ctx), CkksError);
}

TEST_CASE("homomorphism property: add and multiply track the plain oracle") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 31);
    auto rk = gen_relin_key(kp.secret, *ctx);
    Rng rng(404);
    // measure the fresh bound once
    auto w = random_vector(64, 70);
    Ciphertext cw = encrypt(encode(w, ctx->global_scale(), *ctx), kp.public_key, *ctx, 161);
    auto wd = decode(decrypt(cw, kp.secret, *ctx), *ctx);
    double fresh_bound = std::max(max_abs_diff(w, wd, 64), 1e-9);

    for (int trial = 0; trial < 20; ++trial) {
        auto u = random_vector(64, 1000 + trial);
        auto v = random_vector(64, 2000 + trial);
        Ciphertext cu = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx,
                                derive_seed(5, trial, 0));
        Ciphertext cv = encrypt(encode(v, ctx->global_scale(), *ctx), kp.public_key, *ctx,
                                derive_seed(5, trial, 1));
        auto sum = decode(decrypt(add(cu, cv, *ctx), kp.secret, *ctx), *ctx);
        for (size_t i = 0; i < 64; ++i) {
            CHECK(std::abs(sum[i] - (u[i] + v[i])) <= 10 * fresh_bound);
        }
        auto prod = decode(
            decrypt(rescale(relinearize(multiply(cu, cv, *ctx), rk, *ctx), *ctx), kp.secret, *ctx),
            *ctx);
        for (size_t i = 0; i < 64; ++i) {
            CHECK(std::abs(prod[i] - u[i] * v[i]) < 1e-4);
        }
    }
}

TEST_CASE("ciphertext serialization round-trips bit-exactly") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 32);
    auto u = random_vector(64, 80);
    Ciphertext ct = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 171);
    auto bytes = serialize_ciphertext(ct, *ctx);
    Ciphertext back = deserialize_ciphertext(bytes, *ctx);
    CHECK(back.level == ct.level);
    CHECK(back.scale == ct.scale);
    REQUIRE(back.part_count() == ct.part_count());
    for (size_t i = 0; i < ct.parts.size(); ++i) {
        CHECK(back.parts[i].rows == ct.parts[i].rows);
    }
    // serialize(deserialize(x)) is byte-identical
    CHECK(serialize_ciphertext(back, *ctx) == bytes);
    // header sanity: magic + version
    CHECK(bytes[0] == 'C');
    CHECK(bytes[1] == 'K');
    CHECK(bytes[2] == 'K');
    CHECK(bytes[3] == 'S');
}

TEST_CASE("secret key serialization round-trips") {
    auto ctx = default_ctx();
    auto kp = keygen(*ctx, 33);
    auto bytes = serialize_secret_key(kp.secret, *ctx);
    SecretKey back = deserialize_secret_key(bytes, *ctx);
    CHECK(back.s_coeff.rows == kp.secret.s_coeff.rows);
    CHECK(back.seed == kp.secret.seed);
    auto u = random_vector(16, 90);
    Ciphertext ct = encrypt(encode(u, ctx->global_scale(), *ctx), kp.public_key, *ctx, 181);
    auto dec = decode(decrypt(ct, back, *ctx), *ctx);
    CHECK(max_abs_diff(u, dec, 16) < 1e-6);
}
