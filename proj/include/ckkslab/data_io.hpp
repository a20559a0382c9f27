// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ckks::data {

struct Dataset {
    std::vector<std::vector<double>> features;  // rows x n_features
    std::vector<double> labels;
    std::vector<std::string> feature_names;

    size_t rows() const { return features.size(); }
    size_t n_features() const { return features.empty() ? 0 : features[0].size(); }
};

struct LoadReport {
    size_t rows_dropped = 0;  // rows removed for missing / non-numeric cells
};

// Reads a headered CSV, splits out `label_column`, drops rows with missing or
// non-numeric cells and reports how many were dropped.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 LoadReport* report = nullptr);

void save_csv(const Dataset& ds, const std::string& label_column, const std::string& path);

enum class NormMethod { MinMaxSym, ZScore };

struct NormalizationParams {
    NormMethod method = NormMethod::MinMaxSym;
    // per feature: (offset, span) with transform (x - offset) / span
    std::vector<double> offset;
    std::vector<double> span;
};

// MinMaxSym maps each feature onto [-1, 1]; ZScore standardizes. Returns the
// parameters needed to invert the transform.
std::pair<Dataset, NormalizationParams> normalize(const Dataset& ds, NormMethod method);
Dataset denormalize(const Dataset& ds, const NormalizationParams& params);

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             uint64_t seed);

// Synthetic binary classification set: features uniform in (-1, 1), labels
// from a fixed hidden halfspace plus gaussian label noise. Linearly separable
// at noise = 0.
Dataset synth_classification(size_t n_rows, size_t n_features, double noise, uint64_t seed);

}  // namespace ckks::data
