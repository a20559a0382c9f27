// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ckkslab/errors.hpp"
#include "ckkslab/rng.hpp"

namespace ckks::data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and a trailing CR
        size_t b = cell.find_first_not_of(" \t\r");
        size_t e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_number(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) return false;
    return std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column, LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) {
        throw_error(ErrorCode::EmptyAfterCleaning, "no header row in " + path);
    }
    std::vector<std::string> header = split_line(line);
    auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) {
        throw_error(ErrorCode::MissingColumn, "label column '" + label_column + "' not in " + path);
    }
    size_t label_idx = static_cast<size_t>(label_it - header.begin());

    Dataset ds;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i != label_idx) ds.feature_names.push_back(header[i]);
    }

    size_t dropped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            ++dropped;
            continue;
        }
        std::vector<double> row;
        row.reserve(header.size() - 1);
        double label = 0;
        bool valid = true;
        for (size_t i = 0; i < cells.size() && valid; ++i) {
            double v;
            if (!parse_number(cells[i], v)) {
                valid = false;
                break;
            }
            if (i == label_idx) {
                label = v;
            } else {
                row.push_back(v);
            }
        }
        if (!valid) {
            ++dropped;
            continue;
        }
        ds.features.push_back(std::move(row));
        ds.labels.push_back(label);
    }
    if (report) report->rows_dropped = dropped;
    if (ds.features.empty()) {
        throw_error(ErrorCode::EmptyAfterCleaning, "no usable rows in " + path);
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& label_column, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path + " for writing");
    for (const auto& name : ds.feature_names) out << name << ",";
    out << label_column << "\n";
    char buf[64];
    for (size_t i = 0; i < ds.rows(); ++i) {
        for (double v : ds.features[i]) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.12g", ds.labels[i]);
        out << buf << "\n";
    }
}

std::pair<Dataset, NormalizationParams> normalize(const Dataset& ds, NormMethod method) {
    const size_t n = ds.n_features();
    NormalizationParams params;
    params.method = method;
    params.offset.resize(n);
    params.span.resize(n);

    for (size_t j = 0; j < n; ++j) {
        if (method == NormMethod::MinMaxSym) {
            double lo = ds.features[0][j], hi = lo;
            for (const auto& row : ds.features) {
                lo = std::min(lo, row[j]);
                hi = std::max(hi, row[j]);
            }
            // (x - mid) / half maps [lo, hi] onto [-1, 1]
            params.offset[j] = (lo + hi) / 2.0;
            params.span[j] = hi == lo ? 1.0 : (hi - lo) / 2.0;
        } else {
            double mean = 0;
            for (const auto& row : ds.features) mean += row[j];
            mean /= static_cast<double>(ds.rows());
            double var = 0;
            for (const auto& row : ds.features) var += (row[j] - mean) * (row[j] - mean);
            var /= static_cast<double>(ds.rows());
            if (var == 0.0) {
                throw_error(ErrorCode::ConstantColumn,
                            "zscore undefined for constant column " + std::to_string(j));
            }
            params.offset[j] = mean;
            params.span[j] = std::sqrt(var);
        }
    }

    Dataset out = ds;
    for (auto& row : out.features) {
        for (size_t j = 0; j < n; ++j) row[j] = (row[j] - params.offset[j]) / params.span[j];
    }
    return {std::move(out), std::move(params)};
}

Dataset denormalize(const Dataset& ds, const NormalizationParams& params) {
    Dataset out = ds;
    for (auto& row : out.features) {
        for (size_t j = 0; j < row.size(); ++j) {
            row[j] = row[j] * params.span[j] + params.offset[j];
        }
    }
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction,
                                             uint64_t seed) {
    if (ds.rows() < 2) throw_error(ErrorCode::TooFewRows, "need at least 2 rows to split");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw_error(ErrorCode::UsageError, "test_fraction must be in (0, 1)");
    }
    std::vector<size_t> indices(ds.rows());
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(seed);
    for (size_t i = indices.size(); i > 1; --i) {
        size_t j = rng.next_below(i);
        std::swap(indices[i - 1], indices[j]);
    }
    size_t test_count = static_cast<size_t>(std::llround(test_fraction * ds.rows()));
    test_count = std::clamp<size_t>(test_count, 1, ds.rows() - 1);

    Dataset train, test;
    train.feature_names = test.feature_names = ds.feature_names;
    for (size_t i = 0; i < indices.size(); ++i) {
        Dataset& target = i < test_count ? test : train;
        target.features.push_back(ds.features[indices[i]]);
        target.labels.push_back(ds.labels[indices[i]]);
    }
    return {std::move(train), std::move(test)};
}

Dataset synth_classification(size_t n_rows, size_t n_features, double noise, uint64_t seed) {
    if (n_rows < 10) throw_error(ErrorCode::TooFewRows, "synthetic set needs >= 10 rows");
    if (n_features < 1) throw_error(ErrorCode::UsageError, "need at least one feature");
    if (noise < 0) throw_error(ErrorCode::UsageError, "noise must be >= 0");

    // Fixed hidden separator; coefficients alternate sign with varying
    // magnitude so no feature dominates.
    std::vector<double> w_star(n_features);
    for (size_t j = 0; j < n_features; ++j) {
        double mag = 0.8 + 0.15 * static_cast<double>(j % 5);
        w_star[j] = (j % 2 == 0 ? 1.0 : -1.0) * mag;
    }
    const double b_star = -0.1;

    Dataset ds;
    ds.features.assign(n_rows, std::vector<double>(n_features));
    ds.labels.resize(n_rows);
    for (size_t j = 0; j < n_features; ++j) {
        ds.feature_names.push_back("x" + std::to_string(j));
    }
    Rng rng(seed);
    for (size_t i = 0; i < n_rows; ++i) {
        double z = b_star;
        for (size_t j = 0; j < n_features; ++j) {
            double x = rng.next_symmetric();
            ds.features[i][j] = x;
            z += w_star[j] * x;
        }
        if (noise > 0) z += rng.next_gaussian(noise);
        ds.labels[i] = z > 0 ? 1.0 : 0.0;
    }
    return ds;
}

}  // namespace ckks::data
