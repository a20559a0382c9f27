// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ckkslab/params.hpp"

namespace ckks::bench {

// One experiment configuration: n packed vectors of size d with p-decimal
// entries, run on a named preset. With fine_tuned the named preset is used;
// otherwise the whole benchmark grid is swept.
struct ExperimentSpec {
    size_t n = 1;
    size_t d = 10;
    int p = 4;
    std::string preset = "n8192_b200_s40";
    bool fine_tuned = true;
    uint64_t seed = 0;
    size_t trials = 10;
    bool aggregate = false;  // one averaged row per op instead of one per trial
};

struct ResultRow {
    std::string op;  // "+", "-", "*", "matmul"
    size_t n = 0;
    size_t d = 0;
    int p = 0;
    size_t poly_modulus_degree = 0;
    std::string coeff_bit_sizes;  // "60-40-40-60"
    int global_scale_log2 = 0;
    double avg_matching_decimals = 0.0;
    int min_matching_decimals = 0;
    int max_matching_decimals = 0;
    double accuracy_percentage = 0.0;
    double accuracy_loss = 0.0;
    double mse = 0.0;
    double euclidean_distance = 0.0;
    int64_t wall_time_ms = 0;
};

using Matrix = std::vector<std::vector<double>>;
using PresetResolver = std::function<CkksParams(const std::string&)>;

// Random matrices with entries uniform in (-1, 1) rounded half-away-from-zero
// to exactly p decimal places (clamped inside the open interval).
std::pair<Matrix, Matrix> generate_vectors(size_t n, size_t d, int p, uint64_t seed);

// Encrypted {+, -, *} on the packed rows of A and B under the spec's preset;
// one row per operation. A failed multiplication (level exhausted or no
// relinearization key) is recorded as 0.0 matching decimals, as the
// single-prime grid rows demand.
std::vector<ResultRow> run_arithmetic_operations(const Matrix& a, const Matrix& b,
                                                 const CkksParams& params,
                                                 const ExperimentSpec& spec, uint64_t trial_seed);

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const PresetResolver& resolve = nullptr);

// Square encrypted-matrix products of the given sizes; reports MSE and
// Frobenius distance against the plain product. ct_ct switches the second
// operand from plaintext to ciphertext columns.
std::vector<ResultRow> run_matmul_benchmark(const std::vector<size_t>& sizes,
                                            const std::string& preset, uint64_t seed,
                                            bool ct_ct = false,
                                            const PresetResolver& resolve = nullptr);

std::string bit_sizes_string(const std::vector<int>& bits);
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string csv_header();
std::string csv_line(const ResultRow& row);

}  // namespace ckks::bench
