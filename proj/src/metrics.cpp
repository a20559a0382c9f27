// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ckkslab/errors.hpp"

namespace ckks::metrics {

namespace {

void check_lengths(size_t a, size_t b) {
    if (a != b) throw_error(ErrorCode::LengthMismatch, "vector lengths differ");
    if (a == 0) throw_error(ErrorCode::LengthMismatch, "empty vectors");
}

}  // namespace

int matching_decimals(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw_error(ErrorCode::NonFinite, "matching_decimals on non-finite input");
    }
    double diff = std::abs(a - b);
    if (diff > 0.5) return 0;
    int m = 0;
    double threshold = 0.5;
    while (m < 12 && diff <= threshold * 0.1) {
        threshold *= 0.1;
        ++m;
    }
    return m;
}

MatchStats match_stats(const std::vector<double>& u, const std::vector<double>& v) {
    check_lengths(u.size(), v.size());
    MatchStats stats;
    stats.min = 12;
    stats.max = 0;
    double sum = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        int m = matching_decimals(u[i], v[i]);
        stats.min = std::min(stats.min, m);
        stats.max = std::max(stats.max, m);
        sum += m;
    }
    stats.avg = sum / static_cast<double>(u.size());
    return stats;
}

double accuracy_loss(const std::vector<double>& u, const std::vector<double>& v) {
    check_lengths(u.size(), v.size());
    double sum = 0;
    for (size_t i = 0; i < u.size(); ++i) sum += std::abs(u[i] - v[i]);
    return sum / static_cast<double>(u.size());
}

double accuracy_percentage(const std::vector<double>& u, const std::vector<double>& v) {
    check_lengths(u.size(), v.size());
    double sum = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        double rel = std::abs(u[i] - v[i]) / std::max(std::abs(u[i]), 1e-9);
        sum += std::max(0.0, 1.0 - rel);
    }
    return std::clamp(100.0 * sum / static_cast<double>(u.size()), 0.0, 100.0);
}

double mse(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw_error(ErrorCode::ShapeMismatch, "matrix shapes differ");
    }
    double sum = 0;
    size_t count = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) {
            throw_error(ErrorCode::ShapeMismatch, "matrix shapes differ");
        }
        for (size_t j = 0; j < a[i].size(); ++j) {
            double d = a[i][j] - b[i][j];
            sum += d * d;
            ++count;
        }
    }
    if (count == 0) throw_error(ErrorCode::ShapeMismatch, "empty matrices");
    return sum / static_cast<double>(count);
}

double euclidean_distance(const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw_error(ErrorCode::ShapeMismatch, "matrix shapes differ");
    }
    double sum = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) {
            throw_error(ErrorCode::ShapeMismatch, "matrix shapes differ");
        }
        for (size_t j = 0; j < a[i].size(); ++j) {
            double d = a[i][j] - b[i][j];
            sum += d * d;
        }
    }
    return std::sqrt(sum);
}

double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    check_lengths(y_true.size(), y_pred.size());
    double mean = 0;
    for (double y : y_true) mean += y;
    mean /= static_cast<double>(y_true.size());
    double ss_tot = 0, ss_res = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    if (ss_tot == 0.0) {
        throw_error(ErrorCode::ConstantTarget, "R^2 undefined for a constant target");
    }
    return 1.0 - ss_res / ss_tot;
}

double classification_accuracy(const std::vector<double>& y_true,
                               const std::vector<double>& y_prob, double threshold) {
    check_lengths(y_true.size(), y_prob.size());
    size_t correct = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        double predicted = y_prob[i] >= threshold ? 1.0 : 0.0;
        if (predicted == y_true[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(y_true.size());
}

}  // namespace ckks::metrics
