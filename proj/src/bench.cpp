// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "ckkslab/metrics.hpp"
#include "ckkslab/rng.hpp"
#include "ckkslab/scheme.hpp"

namespace ckks::bench {

namespace {

using Clock = std::chrono::steady_clock;

int64_t ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

std::vector<double> flatten(const Matrix& m) {
    std::vector<double> out;
    for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
    return out;
}

CkksParams resolve_preset(const std::string& name, const PresetResolver& resolve) {
    return resolve ? resolve(name) : preset_by_name(name);
}

}  // namespace

std::string bit_sizes_string(const std::vector<int>& bits) {
    std::string out;
    for (size_t i = 0; i < bits.size(); ++i) {
        if (i) out += "-";
        out += std::to_string(bits[i]);
    }
    return out;
}

std::pair<Matrix, Matrix> generate_vectors(size_t n, size_t d, int p, uint64_t seed) {
    if (n < 1 || d < 1 || p < 1 || p > 10) {
        throw_error(ErrorCode::UsageError, "generate_vectors: need n,d >= 1 and p in [1,10]");
    }
    const double grid = std::pow(10.0, p);
    const double max_entry = (grid - 1.0) / grid;  // keep |entry| < 1 after rounding
    Rng rng(seed);
    auto draw = [&] {
        double x = rng.next_symmetric();
        double r = std::round(x * grid) / grid;  // half away from zero
        return std::clamp(r, -max_entry, max_entry);
    };
    Matrix a(n, std::vector<double>(d)), b(n, std::vector<double>(d));
    for (auto& row : a) {
        for (auto& x : row) x = draw();
    }
    for (auto& row : b) {
        for (auto& x : row) x = draw();
    }
    return {std::move(a), std::move(b)};
}

std::vector<ResultRow> run_arithmetic_operations(const Matrix& a, const Matrix& b,
                                                 const CkksParams& params,
                                                 const ExperimentSpec& spec, uint64_t trial_seed) {
    ContextOptions opt;
    opt.shadow_mode = true;
    opt.scale_policy = ScalePolicy::SnapToGlobal;
    auto ctx = CkksContext::create(params, opt);
    auto kp = keygen(*ctx, derive_seed(trial_seed, 0x6e));
    std::optional<RelinKey> rk;
    if (ctx->chain().has_key_prime() && ctx->top_level() >= 1) {
        rk = gen_relin_key(kp.secret, *ctx);
    }

    const size_t n = a.size();
    const size_t d = a[0].size();
    std::vector<Ciphertext> enc_a, enc_b;
    for (size_t i = 0; i < n; ++i) {
        enc_a.push_back(encrypt(encode(a[i], ctx->global_scale(), *ctx), kp.public_key, *ctx,
                                derive_seed(trial_seed, 2 * i)));
        enc_b.push_back(encrypt(encode(b[i], ctx->global_scale(), *ctx), kp.public_key, *ctx,
                                derive_seed(trial_seed, 2 * i + 1)));
    }

    std::vector<ResultRow> rows;
    for (std::string op : {"+", "-", "*"}) {
        Matrix plain(n, std::vector<double>(d));
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < d; ++j) {
                double x = a[i][j], y = b[i][j];
                plain[i][j] = op == "+" ? x + y : (op == "-" ? x - y : x * y);
            }
        }

        Matrix decrypted(n, std::vector<double>(d, 0.0));
        bool failed = false;
        auto start = Clock::now();
        std::vector<Ciphertext> results;
        results.reserve(n);
        for (size_t i = 0; i < n && !failed; ++i) {
            try {
                if (op == "+") {
                    results.push_back(add(enc_a[i], enc_b[i], *ctx));
                } else if (op == "-") {
                    results.push_back(sub(enc_a[i], enc_b[i], *ctx));
                } else {
                    if (!rk) throw_error(ErrorCode::LevelExhausted, "no relinearization key");
                    results.push_back(
                        rescale(relinearize(multiply(enc_a[i], enc_b[i], *ctx), *rk, *ctx), *ctx));
                }
            } catch (const CkksError& e) {
                if (e.code() == ErrorCode::LevelExhausted ||
                    e.code() == ErrorCode::MissingRelinKey ||
                    e.code() == ErrorCode::ScaleOverflow) {
                    // Recorded as zero matching decimals instead of aborting;
                    // the decrypted side stays all-zero.
                    failed = true;
                } else {
                    throw;
                }
            }
        }
        int64_t wall = ms_since(start);
        if (!failed) {
            for (size_t i = 0; i < n; ++i) {
                auto slots = decode(decrypt(results[i], kp.secret, *ctx), *ctx);
                for (size_t j = 0; j < d; ++j) decrypted[i][j] = slots[j];
            }
        }

        ResultRow row;
        row.op = op;
        row.n = n;
        row.d = d;
        row.p = spec.p;
        row.poly_modulus_degree = params.poly_modulus_degree;
        row.coeff_bit_sizes = bit_sizes_string(params.coeff_bit_sizes);
        row.global_scale_log2 = params.global_scale_log2;
        auto flat_plain = flatten(plain);
        auto flat_dec = flatten(decrypted);
        if (failed) {
            row.avg_matching_decimals = 0.0;
            row.min_matching_decimals = 0;
            row.max_matching_decimals = 0;
            row.accuracy_percentage = 0.0;
        } else {
            auto stats = metrics::match_stats(flat_plain, flat_dec);
            row.avg_matching_decimals = stats.avg;
            row.min_matching_decimals = stats.min;
            row.max_matching_decimals = stats.max;
            row.accuracy_percentage = metrics::accuracy_percentage(flat_plain, flat_dec);
        }
        row.accuracy_loss = metrics::accuracy_loss(flat_plain, flat_dec);
        row.mse = metrics::mse(plain, decrypted);
        row.euclidean_distance = metrics::euclidean_distance(plain, decrypted);
        row.wall_time_ms = wall;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

ResultRow aggregate_rows(const std::vector<ResultRow>& rows) {
    ResultRow out = rows.front();
    double avg = 0, acc = 0, loss = 0, err = 0, dist = 0;
    int64_t wall = 0;
    int mn = 12, mx = 0;
    for (const auto& r : rows) {
        avg += r.avg_matching_decimals;
        acc += r.accuracy_percentage;
        loss += r.accuracy_loss;
        err += r.mse;
        dist += r.euclidean_distance;
        wall += r.wall_time_ms;
        mn = std::min(mn, r.min_matching_decimals);
        mx = std::max(mx, r.max_matching_decimals);
    }
    double k = static_cast<double>(rows.size());
    out.avg_matching_decimals = avg / k;
    out.min_matching_decimals = mn;
    out.max_matching_decimals = mx;
    out.accuracy_percentage = acc / k;
    out.accuracy_loss = loss / k;
    out.mse = err / k;
    out.euclidean_distance = dist / k;
    out.wall_time_ms = wall;
    return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const PresetResolver& resolve) {
    if (spec.n < 1 || spec.d < 1 || spec.p < 1 || spec.p > 10 || spec.trials < 1) {
        throw_error(ErrorCode::UsageError, "experiment spec violates its invariants");
    }
    std::vector<std::string> presets;
    if (spec.fine_tuned) {
        presets.push_back(spec.preset);
    } else {
        presets = grid_preset_names();
    }

    std::vector<ResultRow> rows;
    for (const auto& name : presets) {
        CkksParams params = resolve_preset(name, resolve);
        std::vector<std::vector<ResultRow>> per_op(3);
        for (size_t t = 0; t < spec.trials; ++t) {
            // Vectors depend on (seed, trial) only, so every preset sees the
            // same inputs and per-preset results are paired.
            auto [a, b] = generate_vectors(spec.n, spec.d, spec.p, derive_seed(spec.seed, t));
            auto trial_rows =
                run_arithmetic_operations(a, b, params, spec, derive_seed(spec.seed, t, 0x771a));
            for (size_t k = 0; k < 3; ++k) per_op[k].push_back(trial_rows[k]);
        }
        for (size_t k = 0; k < 3; ++k) {
            if (spec.aggregate) {
                rows.push_back(aggregate_rows(per_op[k]));
            } else {
                rows.insert(rows.end(), per_op[k].begin(), per_op[k].end());
            }
        }
    }
    return rows;
}

std::vector<ResultRow> run_matmul_benchmark(const std::vector<size_t>& sizes,
                                            const std::string& preset, uint64_t seed, bool ct_ct,
                                            const PresetResolver& resolve) {
    CkksParams params = resolve_preset(preset, resolve);
    ContextOptions opt;
    opt.shadow_mode = true;
    opt.scale_policy = ScalePolicy::SnapToGlobal;
    auto ctx = CkksContext::create(params, opt);
    auto kp = keygen(*ctx, derive_seed(seed, 0x6e));
    RelinKey rk = gen_relin_key(kp.secret, *ctx);

    size_t max_size = 0;
    for (size_t s : sizes) max_size = std::max(max_size, s);
    if (2 * max_size > ctx->slot_count()) {
        throw_error(ErrorCode::DimensionTooLarge, "matrix side exceeds the packing capacity");
    }
    std::vector<int64_t> steps{1};
    for (int64_t s = 1; s < static_cast<int64_t>(max_size); s <<= 1) steps.push_back(s);
    GaloisKeys gk = gen_galois_keys(kp.secret, steps, *ctx);

    std::vector<ResultRow> rows;
    for (size_t s : sizes) {
        Rng rng(derive_seed(seed, s));
        Matrix a(s, std::vector<double>(s)), b(s, std::vector<double>(s));
        for (auto& row : a) {
            for (auto& x : row) x = rng.next_symmetric();
        }
        for (auto& row : b) {
            for (auto& x : row) x = rng.next_symmetric();
        }
        Matrix plain(s, std::vector<double>(s, 0.0));
        for (size_t i = 0; i < s; ++i) {
            for (size_t k = 0; k < s; ++k) {
                for (size_t j = 0; j < s; ++j) plain[i][j] += a[i][k] * b[k][j];
            }
        }

        Matrix decrypted(s, std::vector<double>(s, 0.0));
        auto start = Clock::now();
        if (ct_ct) {
            Matrix b_cols(s, std::vector<double>(s));
            for (size_t i = 0; i < s; ++i) {
                for (size_t j = 0; j < s; ++j) b_cols[j][i] = b[i][j];
            }
            auto enc_a =
                encrypt_matrix_rows(a, RowPacking::ZeroPad, kp.public_key, *ctx, derive_seed(seed, s, 1));
            auto enc_b = encrypt_matrix_rows(b_cols, RowPacking::ZeroPad, kp.public_key, *ctx,
                                             derive_seed(seed, s, 2));
            auto grid = matmul_ct(enc_a, enc_b, s, gk, rk, *ctx);
            for (size_t i = 0; i < s; ++i) {
                for (size_t j = 0; j < s; ++j) {
                    decrypted[i][j] = decode(decrypt(grid[i][j], kp.secret, *ctx), *ctx)[0];
                }
            }
        } else {
            auto enc_a = encrypt_matrix_rows(a, RowPacking::DoubledRow, kp.public_key, *ctx,
                                             derive_seed(seed, s, 1));
            auto result = matmul_plain(enc_a, b, gk, *ctx);
            for (size_t i = 0; i < s; ++i) {
                auto slots = decode(decrypt(result[i], kp.secret, *ctx), *ctx);
                for (size_t j = 0; j < s; ++j) decrypted[i][j] = slots[j];
            }
        }
        int64_t wall = ms_since(start);

        ResultRow row;
        row.op = "matmul";
        row.n = s;
        row.d = s;
        row.p = 0;
        row.poly_modulus_degree = params.poly_modulus_degree;
        row.coeff_bit_sizes = bit_sizes_string(params.coeff_bit_sizes);
        row.global_scale_log2 = params.global_scale_log2;
        auto flat_plain = flatten(plain);
        auto flat_dec = flatten(decrypted);
        auto stats = metrics::match_stats(flat_plain, flat_dec);
        row.avg_matching_decimals = stats.avg;
        row.min_matching_decimals = stats.min;
        row.max_matching_decimals = stats.max;
        row.accuracy_percentage = metrics::accuracy_percentage(flat_plain, flat_dec);
        row.accuracy_loss = metrics::accuracy_loss(flat_plain, flat_dec);
        row.mse = metrics::mse(plain, decrypted);
        row.euclidean_distance = metrics::euclidean_distance(plain, decrypted);
        row.wall_time_ms = wall;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_header() {
    return "op,n,d,p,poly_modulus_degree,coeff_bit_sizes,global_scale_log2,"
           "avg_matching_decimals,min_matching_decimals,max_matching_decimals,"
           "accuracy_percentage,accuracy_loss,mse,euclidean_distance,wall_time_ms";
}

std::string csv_line(const ResultRow& row) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%d,%zu,%s,%d,%.12g,%d,%d,%.12g,%.12g,%.12g,%.12g,%lld",
                  row.op.c_str(), row.n, row.d, row.p, row.poly_modulus_degree,
                  row.coeff_bit_sizes.c_str(), row.global_scale_log2, row.avg_matching_decimals,
                  row.min_matching_decimals, row.max_matching_decimals, row.accuracy_percentage,
                  row.accuracy_loss, row.mse, row.euclidean_distance,
                  static_cast<long long>(row.wall_time_ms));
    return buf;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << csv_header() << "\n";
    for (const auto& row : rows) out << csv_line(row) << "\n";
    if (!out) throw_error(ErrorCode::IoError, "short write to " + path);
}

}  // namespace ckks::bench
