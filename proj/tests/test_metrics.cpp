// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "ckkslab/errors.hpp"
#include "ckkslab/metrics.hpp"
#include "ckkslab/rng.hpp"

using namespace ckks;
using namespace ckks::metrics;

TEST_CASE("matching_decimals basics") {
    CHECK(matching_decimals(0.37, 0.37) == 12);
    CHECK(matching_decimals(123.456, 123.456) == 12);
    CHECK(matching_decimals(0.123456, 0.123499) == 4);  // |d| = 4.3e-5 <= 5e-5, > 5e-6
    CHECK(matching_decimals(0.2, 0.9) == 0);
    CHECK(matching_decimals(1.0, 2.0) == 0);
    CHECK_THROWS_AS(matching_decimals(std::nan(""), 0.0), CkksError);
    CHECK_THROWS_AS(matching_decimals(0.0, INFINITY), CkksError);
}

TEST_CASE("matching_decimals is symmetric, shift-invariant, monotone") {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        double a = rng.next_symmetric();
        double b = rng.next_symmetric();
        double c = rng.next_symmetric() * 10;
        CHECK(matching_decimals(a, b) == matching_decimals(b, a));
        CHECK(matching_decimals(a + c, b + c) == matching_decimals(a, b));
    }
    // monotone non-increasing in |a - b|
    double prev = 13;
    for (double d : {1e-9, 1e-7, 1e-5, 1e-3, 1e-1, 0.4, 0.7}) {
        int m = matching_decimals(0.0, d);
        CHECK(m <= prev);
        prev = m;
    }
}

TEST_CASE("match_stats aggregates elementwise counts") {
    auto identical = match_stats({0.1, 0.2, 0.3}, {0.1, 0.2, 0.3});
    CHECK(identical.avg == 12.0);
    CHECK(identical.min == 12);
    CHECK(identical.max == 12);

    // |d| = 8e-5 -> 3 decimals; |d| = 7.7e-3 -> 1 decimal.
    auto mixed = match_stats({0.11111, 0.22222}, {0.11119, 0.22992});
    CHECK(mixed.min == 1);
    CHECK(mixed.max == 3);
    CHECK(mixed.avg == doctest::Approx(2.0));

    CHECK_THROWS_AS(match_stats({0.1}, {0.1, 0.2}), CkksError);
}

TEST_CASE("accuracy_loss is the mean absolute error") {
    CHECK(accuracy_loss({0.4, -0.2}, {0.4, -0.2}) == 0.0);
    CHECK(accuracy_loss({0.0, 0.0}, {0.1, -0.3}) == doctest::Approx(0.2));
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> u{rng.next_symmetric(), rng.next_symmetric()};
        std::vector<double> v{rng.next_symmetric(), rng.next_symmetric()};
        CHECK(accuracy_loss(u, v) >= 0.0);
    }
}

TEST_CASE("accuracy_percentage definition and clamping") {
    CHECK(accuracy_percentage({0.3, -0.7}, {0.3, -0.7}) == 100.0);
    CHECK(accuracy_percentage({1.0}, {0.9}) == doctest::Approx(90.0));
    CHECK(accuracy_percentage({0.5}, {1.5}) == 0.0);
}

TEST_CASE("mse and euclidean distance") {
    std::vector<std::vector<double>> a{{1.0, 2.0}};
    std::vector<std::vector<double>> z{{0.0, 0.0}};
    CHECK(mse(a, a) == 0.0);
    CHECK(euclidean_distance(a, a) == 0.0);
    CHECK(mse(a, z) == doctest::Approx(2.5));
    CHECK(euclidean_distance(a, z) == doctest::Approx(std::sqrt(5.0)));
    CHECK_THROWS_AS(mse(a, {{1.0}}), CkksError);
}

TEST_CASE("distance squared equals mse times the element count") {
    Rng rng(3);
    std::vector<std::vector<double>> a(4, std::vector<double>(6));
    std::vector<std::vector<double>> b(4, std::vector<double>(6));
    for (auto& row : a) {
        for (auto& x : row) x = rng.next_symmetric();
    }
    for (auto& row : b) {
        for (auto& x : row) x = rng.next_symmetric();
    }
    double d = euclidean_distance(a, b);
    CHECK(d * d == doctest::Approx(mse(a, b) * 24.0));
}

TEST_CASE("mse quasi-triangle bound") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::vector<double>> a(1, std::vector<double>(8));
        std::vector<std::vector<double>> b = a, c = a;
        for (auto& x : a[0]) x = rng.next_symmetric();
        for (auto& x : b[0]) x = rng.next_symmetric();
        for (auto& x : c[0]) x = rng.next_symmetric();
        CHECK(mse(a, c) <= 2.0 * (mse(a, b) + mse(b, c)) + 1e-12);
    }
}

TEST_CASE("r_squared") {
    CHECK(r_squared({0, 1, 2, 3}, {0, 1, 2, 3}) == doctest::Approx(1.0));
    CHECK(r_squared({0, 1, 2, 3}, {0, 1, 2, 2}) == doctest::Approx(0.8));
    CHECK_THROWS_AS(r_squared({1, 1, 1}, {0, 1, 2}), CkksError);
}

TEST_CASE("classification_accuracy with ties counted as class 1") {
    CHECK(classification_accuracy({1, 0, 1}, {0.9, 0.1, 0.8}, 0.5) == doctest::Approx(1.0));
    // all-0.5 probabilities, balanced labels: ties classify as 1
    CHECK(classification_accuracy({1, 0, 1, 0}, {0.5, 0.5, 0.5, 0.5}, 0.5) ==
          doctest::Approx(0.5));
}
