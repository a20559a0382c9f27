// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <fstream>

#include "ckkslab/scheme.hpp"

namespace ckks {

namespace {

constexpr uint16_t kFormatVersion = 1;

void put_bytes(std::vector<uint8_t>& out, const void* src, size_t len) {
    const auto* p = static_cast<const uint8_t*>(src);
    out.insert(out.end(), p, p + len);
}

template <typename T>
void put_le(std::vector<uint8_t>& out, T value) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<uint8_t>(value >> (8 * i)));
    }
}

void put_f64(std::vector<uint8_t>& out, double value) {
    uint64_t bits;
    std::memcpy(&bits, &value, 8);
    put_le(out, bits);
}

class Reader {
public:
    explicit Reader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

    template <typename T>
    T get_le() {
        need(sizeof(T));
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(T);
        return v;
    }

    double get_f64() {
        uint64_t bits = get_le<uint64_t>();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void get_raw(void* dst, size_t len) {
        need(len);
        std::memcpy(dst, bytes_.data() + pos_, len);
        pos_ += len;
    }

private:
    void need(size_t len) const {
        if (pos_ + len > bytes_.size()) {
            throw_error(ErrorCode::IoError, "truncated serialized blob");
        }
    }

    const std::vector<uint8_t>& bytes_;
    size_t pos_ = 0;
};

// Residue rows are stored in coefficient form so the byte layout is the
// canonical one regardless of in-memory evaluation representation.
void put_poly_rows(std::vector<uint8_t>& out, const RnsPolynomial& poly) {
    RnsPolynomial coeff = to_form(poly, PolyForm::Coeff);
    for (const auto& row : coeff.rows) {
        for (u64 v : row) put_le(out, v);
    }
}

RnsPolynomial get_poly_rows(Reader& reader, const CkksContext& ctx, size_t rows) {
    RnsPolynomial p = RnsPolynomial::zero(ctx.ring(), rows);
    for (size_t i = 0; i < rows; ++i) {
        for (auto& v : p.rows[i]) v = reader.get_le<u64>();
    }
    ntt_transform(p, NttDirection::Forward);
    return p;
}

}  // namespace

std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct, const CkksContext& ctx) {
    std::vector<uint8_t> out;
    put_bytes(out, "CKKS", 4);
    put_le<uint16_t>(out, kFormatVersion);
    put_le<uint32_t>(out, static_cast<uint32_t>(ctx.degree()));
    put_le<uint16_t>(out, static_cast<uint16_t>(ct.level));
    put_le<uint8_t>(out, static_cast<uint8_t>(ct.parts.size()));
    put_f64(out, ct.scale);
    for (const auto& part : ct.parts) put_poly_rows(out, part);
    return out;
}

Ciphertext deserialize_ciphertext(const std::vector<uint8_t>& bytes, const CkksContext& ctx) {
    Reader reader(bytes);
    char magic[4];
    reader.get_raw(magic, 4);
    if (std::memcmp(magic, "CKKS", 4) != 0) {
        throw_error(ErrorCode::IoError, "bad magic in serialized ciphertext");
    }
    uint16_t version = reader.get_le<uint16_t>();
    if (version != kFormatVersion) {
        throw_error(ErrorCode::IoError, "unsupported format version " + std::to_string(version));
    }
    uint32_t degree = reader.get_le<uint32_t>();
    if (degree != ctx.degree()) {
        throw_error(ErrorCode::IoError, "ciphertext degree does not match the context");
    }
    Ciphertext ct;
    ct.level = reader.get_le<uint16_t>();
    uint8_t parts = reader.get_le<uint8_t>();
    ct.scale = reader.get_f64();
    for (uint8_t i = 0; i < parts; ++i) {
        ct.parts.push_back(get_poly_rows(reader, ctx, ct.level + 1));
    }
    return ct;
}

std::vector<uint8_t> serialize_secret_key(const SecretKey& sk, const CkksContext& ctx) {
    std::vector<uint8_t> out;
    put_bytes(out, "CKKS", 4);
    put_le<uint16_t>(out, kFormatVersion);
    put_le<uint32_t>(out, static_cast<uint32_t>(ctx.degree()));
    put_le<uint16_t>(out, static_cast<uint16_t>(sk.s_coeff.rows.size() - 1));
    put_le<uint8_t>(out, 1);
    put_f64(out, 1.0);
    put_le<uint64_t>(out, sk.seed);
    put_poly_rows(out, sk.s_coeff);
    return out;
}

SecretKey deserialize_secret_key(const std::vector<uint8_t>& bytes, const CkksContext& ctx) {
    Reader reader(bytes);
    char magic[4];
    reader.get_raw(magic, 4);
    if (std::memcmp(magic, "CKKS", 4) != 0) {
        throw_error(ErrorCode::IoError, "bad magic in serialized key");
    }
    if (reader.get_le<uint16_t>() != kFormatVersion) {
        throw_error(ErrorCode::IoError, "unsupported key format version");
    }
    if (reader.get_le<uint32_t>() != ctx.degree()) {
        throw_error(ErrorCode::IoError, "key degree does not match the context");
    }
    uint16_t level = reader.get_le<uint16_t>();
    reader.get_le<uint8_t>();
    reader.get_f64();
    SecretKey sk;
    sk.seed = reader.get_le<uint64_t>();
    RnsPolynomial s = get_poly_rows(reader, ctx, level + 1);
    sk.s_ntt = s;
    sk.s_coeff = to_form(s, PolyForm::Coeff);
    sk.s_sq_ntt = poly_mul(sk.s_ntt, sk.s_ntt);
    return sk;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw_error(ErrorCode::IoError, "short write to " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
    std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw_error(ErrorCode::IoError, "short read from " + path);
    return bytes;
}

}  // namespace ckks
