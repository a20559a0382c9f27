// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ckks {

enum class SecurityLevel { None, Classic128 };

// How rescaling reports the resulting scale.
//
// Exact keeps the true quotient scale / q_dropped, so scale bookkeeping is
// lossless. SnapToGlobal pins the scale back to the context's global scale
// after every rescale, the way fixed-global-scale pipelines (TenSEAL-style
// CKKSVector stacks) do; the relative offset between the dropped prime and
// the nominal scale then lands in the values as extra error. The benchmark
// harness runs SnapToGlobal because that is the system whose precision
// behavior it measures.
enum class ScalePolicy { Exact, SnapToGlobal };

struct CkksParams {
    size_t poly_modulus_degree = 8192;
    std::vector<int> coeff_bit_sizes{60, 40, 40, 60};
    int global_scale_log2 = 40;
    SecurityLevel security_level = SecurityLevel::Classic128;

    double global_scale() const;
    size_t slot_count() const { return poly_modulus_degree / 2; }
    int total_bits() const;
};

struct ValidationResult {
    bool ok = true;
    std::vector<std::string> warnings;
};

// Rejects structurally invalid parameters (non-power-of-two degree, empty or
// out-of-range bit sizes) and returns warnings for configurations that are
// legal but insecure or precision-hostile.
ValidationResult validate_params(const CkksParams& params);

// Maximum total coefficient modulus bits at 128-bit classical security
// (ternary secret), per the HomomorphicEncryption.org tables.
int max_modulus_bits_128(size_t poly_modulus_degree);

// Named parameter presets covering the benchmark grid plus the training
// default. Addressable by name, e.g. "n8192_b200_s40".
const std::map<std::string, CkksParams>& builtin_presets();
CkksParams preset_by_name(const std::string& name);
// Names of the benchmark-grid presets in canonical (grid) order.
const std::vector<std::string>& grid_preset_names();
// Default preset for encrypted training (deep enough for forward + backward
// + update without an intermediate refresh).
std::string training_preset_name();

// JSON preset files: {"name": {"poly_modulus_degree": N,
// "coeff_bit_sizes": [..], "global_scale_log2": k}, ...}
std::map<std::string, CkksParams> load_presets_file(const std::string& path);
void write_presets_file(const std::map<std::string, CkksParams>& presets,
                        const std::string& path);

}  // namespace ckks
