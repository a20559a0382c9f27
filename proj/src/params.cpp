// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/params.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ckkslab/errors.hpp"

namespace ckks {

double CkksParams::global_scale() const { return std::ldexp(1.0, global_scale_log2); }

int CkksParams::total_bits() const {
    int total = 0;
    for (int b : coeff_bit_sizes) total += b;
    return total;
}

int max_modulus_bits_128(size_t poly_modulus_degree) {
    switch (poly_modulus_degree) {
        case 1024: return 27;
        case 2048: return 54;
        case 4096: return 109;
        case 8192: return 218;
        case 16384: return 438;
        case 32768: return 881;
        default: return 0;
    }
}

ValidationResult validate_params(const CkksParams& params) {
    size_t n = params.poly_modulus_degree;
    if (n < 1024 || n > 32768 || (n & (n - 1)) != 0) {
        throw_error(ErrorCode::InvalidDegree,
                    "poly_modulus_degree " + std::to_string(n) +
                        " is not a power of two in [1024, 32768]");
    }
    if (params.coeff_bit_sizes.empty()) {
        throw_error(ErrorCode::InvalidBitSize, "coeff_bit_sizes is empty");
    }
    for (int b : params.coeff_bit_sizes) {
        if (b < 20 || b > 60) {
            throw_error(ErrorCode::InvalidBitSize,
                        "coefficient bit size " + std::to_string(b) + " outside [20, 60]");
        }
    }
    if (params.global_scale_log2 < 1 || params.global_scale_log2 > 120) {
        throw_error(ErrorCode::ScaleOverflow, "global scale exponent outside [1, 120]");
    }

    ValidationResult result;
    int total = params.total_bits();
    int cap = max_modulus_bits_128(n);
    if (params.security_level == SecurityLevel::Classic128) {
        if (total > cap) {
            result.warnings.push_back(
                "InsecureParams: total coefficient bits " + std::to_string(total) +
                " exceed the 128-bit security cap " + std::to_string(cap) + " for N=" +
                std::to_string(n));
        } else if (total == cap) {
            result.warnings.push_back("at security boundary: total coefficient bits " +
                                      std::to_string(total) + " equal the 128-bit cap for N=" +
                                      std::to_string(n));
        }
    }
    if (params.coeff_bit_sizes.size() >= 3) {
        int smallest_middle = 61;
        for (size_t i = 1; i + 1 < params.coeff_bit_sizes.size(); ++i) {
            smallest_middle = std::min(smallest_middle, params.coeff_bit_sizes[i]);
        }
        if (params.global_scale_log2 >= smallest_middle + 10) {
            result.warnings.push_back(
                "global scale 2^" + std::to_string(params.global_scale_log2) +
                " is far above the smallest rescaling prime (2^" +
                std::to_string(smallest_middle) +
                "); rescaled ciphertexts will not land near the nominal scale");
        }
    }
    if (params.coeff_bit_sizes.size() < 2) {
        result.warnings.push_back(
            "single-prime chain: no key-switching prime, multiplication will exhaust levels");
    }
    return result;
}

namespace {

CkksParams make_params(size_t n, std::vector<int> bits, int scale_log2) {
    CkksParams p;
    p.poly_modulus_degree = n;
    p.coeff_bit_sizes = std::move(bits);
    p.global_scale_log2 = scale_log2;
    return p;
}

}  // namespace

const std::map<std::string, CkksParams>& builtin_presets() {
    static const std::map<std::string, CkksParams> presets = {
        {"n2048_b54_s16", make_params(2048, {54}, 16)},
        {"n4096_b75_s20", make_params(4096, {20, 20, 35}, 20)},
        {"n4096_b90_s25", make_params(4096, {25, 25, 40}, 25)},
        {"n8192_b122_s21", make_params(8192, {21, 40, 40, 21}, 21)},
        {"n8192_b160_s40", make_params(8192, {40, 40, 40, 40}, 40)},
        {"n8192_b200_s40", make_params(8192, {60, 40, 40, 60}, 40)},
        {"n8192_b206_s21", make_params(8192, {40, 21, 21, 21, 21, 21, 21, 40}, 21)},
        {"n8192_b206_s40", make_params(8192, {40, 21, 21, 21, 21, 21, 21, 40}, 40)},
        {"n16384_b200_s40", make_params(16384, {60, 40, 40, 60}, 40)},
        {"n32768_b300_s40", make_params(32768, {60, 40, 40, 40, 40, 40, 40}, 40)},
        {"n16384_b320_s40", make_params(16384, {60, 40, 40, 40, 40, 40, 60}, 40)},
    };
    return presets;
}

CkksParams preset_by_name(const std::string& name) {
    const auto& presets = builtin_presets();
    auto it = presets.find(name);
    if (it == presets.end()) {
        throw_error(ErrorCode::UnknownPreset, "no preset named '" + name + "'");
    }
    return it->second;
}

const std::vector<std::string>& grid_preset_names() {
    // One entry per distinct (bits, N, scale) combination of the benchmark
    // grid, in the canonical reporting order.
    static const std::vector<std::string> names = {
        "n2048_b54_s16",  "n4096_b75_s20",   "n4096_b90_s25",  "n8192_b122_s21",
        "n8192_b206_s40", "n8192_b206_s21",  "n32768_b300_s40", "n16384_b200_s40",
        "n8192_b160_s40", "n8192_b200_s40",
    };
    return names;
}

std::string training_preset_name() { return "n16384_b320_s40"; }

std::map<std::string, CkksParams> load_presets_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorCode::IoError, "cannot open presets file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw_error(ErrorCode::IoError, std::string("presets parse failure: ") + e.what());
    }
    std::map<std::string, CkksParams> presets;
    for (auto& [name, body] : doc.items()) {
        CkksParams p;
        p.poly_modulus_degree = body.at("poly_modulus_degree").get<size_t>();
        p.coeff_bit_sizes = body.at("coeff_bit_sizes").get<std::vector<int>>();
        p.global_scale_log2 = body.at("global_scale_log2").get<int>();
        presets[name] = p;
    }
    return presets;
}

void write_presets_file(const std::map<std::string, CkksParams>& presets,
                        const std::string& path) {
    nlohmann::json doc;
    for (const auto& [name, p] : presets) {
        doc[name] = {{"poly_modulus_degree", p.poly_modulus_degree},
                     {"coeff_bit_sizes", p.coeff_bit_sizes},
                     {"global_scale_log2", p.global_scale_log2}};
    }
    std::ofstream out(path);
    if (!out) throw_error(ErrorCode::IoError, "cannot write presets file " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace ckks
