// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace ckks::metrics {

// Matching decimal places of two scalars: the largest m in [0, 12] with
// |a - b| <= 0.5 * 10^-m, and 0 when they differ before the first decimal.
// Integer parts are not counted.
int matching_decimals(double a, double b);

struct MatchStats {
    double avg = 0.0;
    int min = 0;
    int max = 0;
};

MatchStats match_stats(const std::vector<double>& u, const std::vector<double>& v);

// Mean absolute error.
double accuracy_loss(const std::vector<double>& u, const std::vector<double>& v);

// 100 * mean_i max(0, 1 - |u_i - v_i| / max(|u_i|, 1e-9)), clamped to [0, 100].
double accuracy_percentage(const std::vector<double>& u, const std::vector<double>& v);

double mse(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);
double euclidean_distance(const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b);

double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Threshold classification accuracy; probabilities exactly at the threshold
// classify as 1.
double classification_accuracy(const std::vector<double>& y_true,
                               const std::vector<double>& y_prob, double threshold);

}  // namespace ckks::metrics
