// SPDX-License-Identifier: Apache-2.0

#include "ckkslab/lr.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include "ckkslab/metrics.hpp"
#include "ckkslab/rng.hpp"

namespace ckks::lr {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<double> kSigmoidCoeffs{0.5, 0.197, 0.0, -0.004};

size_t next_pow2(size_t v) {
    size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

int64_t ms_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

// Transparent (noiseless) encryption of zero; summation order and thread
// count cannot perturb gradients accumulated on top of it.
Ciphertext trivial_zero(const CkksContext& ctx, size_t level, double scale) {
    Ciphertext ct;
    ct.level = level;
    ct.scale = scale;
    ct.parts.assign(2, RnsPolynomial::zero(ctx.ring(), level + 1, PolyForm::Ntt));
    if (ctx.shadow_mode()) ct.shadow = std::vector<double>(ctx.slot_count(), 0.0);
    return ct;
}

}  // namespace

LRModel initialize_lr(size_t n_features, uint64_t seed) {
    if (n_features < 1) throw_error(ErrorCode::UsageError, "need at least one feature");
    LRModel model;
    model.w.resize(n_features);
    double bound = 1.0 / std::sqrt(static_cast<double>(n_features));
    Rng rng(seed);
    for (auto& w : model.w) w = bound * rng.next_symmetric();
    model.b = 0.0;
    return model;
}

double sigmoid_approx(double x) { return 0.5 + 0.197 * x - 0.004 * x * x * x; }

double forward_plain(const LRModel& model, const std::vector<double>& x) {
    if (x.size() != model.w.size()) {
        throw_error(ErrorCode::DimensionMismatch, "feature count does not match the model");
    }
    double z = model.b;
    for (size_t i = 0; i < x.size(); ++i) z += model.w[i] * x[i];
    return 1.0 / (1.0 + std::exp(-z));
}

EvalResult evaluate(const LRModel& model, const data::Dataset& testset) {
    if (testset.rows() == 0) throw_error(ErrorCode::EmptyTestSet, "empty test set");
    std::vector<double> probs(testset.rows());
    for (size_t i = 0; i < testset.rows(); ++i) probs[i] = forward_plain(model, testset.features[i]);
    EvalResult result;
    result.accuracy = metrics::classification_accuracy(testset.labels, probs, 0.5);
    result.r_squared = metrics::r_squared(testset.labels, probs);
    return result;
}

Ciphertext encrypt_features(const std::vector<double>& x, size_t padded, const PublicKey& pk,
                            const CkksContext& ctx, uint64_t seed) {
    std::vector<double> block(padded, 0.0);
    for (size_t i = 0; i < x.size(); ++i) block[i] = x[i];
    Plaintext pt = encode(block, ctx.global_scale(), ctx, /*replicate=*/true);
    return encrypt(pt, pk, ctx, seed);
}

EncryptedLRModel::EncryptedLRModel(const LRModel& init, const KeyPair& keys,
                                   std::shared_ptr<const CkksContext> ctx, uint64_t seed)
    : ctx_(std::move(ctx)), keys_(keys), n_features_(init.w.size()),
      padded_(next_pow2(init.w.size())), seed_(seed) {
    if (ctx_->top_level() < 5) {
        throw_error(ErrorCode::LevelExhausted,
                    "training needs a chain with at least five rescaling levels "
                    "(forward 3, backward 1, update 1)");
    }
    reencrypt(init, derive_seed(seed, 0x11));
    reset_accumulators();
}

void EncryptedLRModel::reset_accumulators() {
    const size_t top = ctx_->top_level();
    // delta_w collects rescaled x (a - y) products (four levels below the
    // top), delta_b the activation residuals (three levels below).
    delta_w_ = trivial_zero(*ctx_, top - 4, ctx_->global_scale());
    delta_b_ = trivial_zero(*ctx_, top - 3, ctx_->global_scale());
    count_ = 0;
}

void EncryptedLRModel::reencrypt(const LRModel& model, uint64_t seed) {
    std::vector<double> w_block(padded_, 0.0);
    for (size_t i = 0; i < model.w.size(); ++i) w_block[i] = model.w[i];
    Plaintext pw = encode(w_block, ctx_->global_scale(), *ctx_, /*replicate=*/true);
    Plaintext pb = encode({model.b}, ctx_->global_scale(), *ctx_, /*replicate=*/true);
    enc_w_ = encrypt(pw, keys_.public_key, *ctx_, derive_seed(seed, 0x77));
    enc_b_ = encrypt(pb, keys_.public_key, *ctx_, derive_seed(seed, 0x78));
}

Ciphertext EncryptedLRModel::forward(const Ciphertext& enc_x, const GaloisKeys& gk,
                                     const RelinKey& rk) const {
    Ciphertext z = dot(enc_w_, enc_x, padded_, gk, rk, *ctx_);
    z = add(z, mod_switch_to_level(enc_b_, z.level, *ctx_), *ctx_);
    return polyval(z, kSigmoidCoeffs, rk, *ctx_);
}

void EncryptedLRModel::backward(const Ciphertext& enc_x, const Ciphertext& enc_a,
                                const Ciphertext& enc_y, const RelinKey& rk) {
    Ciphertext delta_a = sub(enc_a, mod_switch_to_level(enc_y, enc_a.level, *ctx_), *ctx_);
    Ciphertext x_at = mod_switch_to_level(enc_x, delta_a.level, *ctx_);
    Ciphertext grad = rescale(relinearize(multiply(x_at, delta_a, *ctx_), rk, *ctx_), *ctx_);
    delta_w_ = add(delta_w_, mod_switch_to_level(grad, delta_w_.level, *ctx_), *ctx_);
    delta_b_ = add(delta_b_, mod_switch_to_level(delta_a, delta_b_.level, *ctx_), *ctx_);
    ++count_;
}

void EncryptedLRModel::absorb_gradients(const EncryptedLRModel& other) {
    if (other.count_ == 0) return;
    delta_w_ = add(delta_w_, other.delta_w_, *ctx_);
    delta_b_ = add(delta_b_, other.delta_b_, *ctx_);
    count_ += other.count_;
}

void EncryptedLRModel::update_parameters(double reg_coeff) {
    if (count_ == 0) {
        throw_error(ErrorCode::NoAccumulatedGradients, "update_parameters before any backward");
    }
    const double inv_count = 1.0 / static_cast<double>(count_);

    Plaintext p_inv_w =
        encode({inv_count}, ctx_->global_scale(), *ctx_, true, delta_w_.level);
    Ciphertext dw = rescale(multiply_plain(delta_w_, p_inv_w, *ctx_), *ctx_);

    Plaintext p_keep = encode({1.0 - reg_coeff}, ctx_->global_scale(), *ctx_, true, enc_w_.level);
    Ciphertext w_scaled = rescale(multiply_plain(enc_w_, p_keep, *ctx_), *ctx_);
    enc_w_ = sub(mod_switch_to_level(w_scaled, dw.level, *ctx_), dw, *ctx_);

    Plaintext p_inv_b =
        encode({inv_count}, ctx_->global_scale(), *ctx_, true, delta_b_.level);
    Ciphertext db = rescale(multiply_plain(delta_b_, p_inv_b, *ctx_), *ctx_);
    enc_b_ = sub(mod_switch_to_level(enc_b_, db.level, *ctx_), db, *ctx_);

    reset_accumulators();
}

LRModel EncryptedLRModel::decrypt_model(const SecretKey& sk) const {
    LRModel model;
    auto w_slots = decode(decrypt(enc_w_, sk, *ctx_), *ctx_);
    model.w.assign(w_slots.begin(), w_slots.begin() + static_cast<long>(n_features_));
    model.b = decode(decrypt(enc_b_, sk, *ctx_), *ctx_)[0];
    return model;
}

namespace {

// The plain twin runs the same full-batch loop with the same polynomial
// activation in exact arithmetic.
void plain_epoch(LRModel& model, const data::Dataset& ds, double reg_coeff) {
    const size_t n = ds.rows();
    std::vector<double> delta_w(model.w.size(), 0.0);
    double delta_b = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double z = model.b;
        for (size_t j = 0; j < model.w.size(); ++j) z += model.w[j] * ds.features[i][j];
        double a = sigmoid_approx(z);
        double da = a - ds.labels[i];
        for (size_t j = 0; j < model.w.size(); ++j) delta_w[j] += ds.features[i][j] * da;
        delta_b += da;
    }
    for (size_t j = 0; j < model.w.size(); ++j) {
        model.w[j] = (1.0 - reg_coeff) * model.w[j] - delta_w[j] / static_cast<double>(n);
    }
    model.b -= delta_b / static_cast<double>(n);
}

}  // namespace

TrainResult train(const data::Dataset& trainset, const data::Dataset& testset,
                  const TrainConfig& config) {
    if (config.epochs < 1) throw_error(ErrorCode::UsageError, "epochs must be >= 1");
    if (config.reg_coeff < 0) throw_error(ErrorCode::UsageError, "reg_coeff must be >= 0");
    for (double y : trainset.labels) {
        if (y != 0.0 && y != 1.0) {
            throw_error(ErrorCode::UsageError, "labels must be 0/1 for logistic training");
        }
    }

    std::string preset_name = config.preset.empty() ? training_preset_name() : config.preset;
    ContextOptions opt;
    opt.scale_policy = ScalePolicy::SnapToGlobal;
    auto ctx = CkksContext::create(preset_by_name(preset_name), opt);
    auto kp = keygen(*ctx, derive_seed(config.seed, 0x6e));
    RelinKey rk = gen_relin_key(kp.secret, *ctx);

    const size_t d = trainset.n_features();
    const size_t padded = next_pow2(d);
    std::vector<int64_t> steps;
    for (size_t s = 1; s < padded; s <<= 1) steps.push_back(static_cast<int64_t>(s));
    if (steps.empty()) steps.push_back(1);
    GaloisKeys gk = gen_galois_keys(kp.secret, steps, *ctx);

    LRModel init = initialize_lr(d, derive_seed(config.seed, 0x1f));
    LRModel plain = init;
    EncryptedLRModel enc_model(init, kp, ctx, derive_seed(config.seed, 0x2f));

    size_t threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
    threads = std::max<size_t>(1, std::min(threads, size_t{8}));

    TrainResult result;
    const size_t n = trainset.rows();
    for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // plain twin epoch
        auto plain_start = Clock::now();
        plain_epoch(plain, trainset, config.reg_coeff);
        int64_t plain_ms = ms_since(plain_start);
        auto plain_eval = evaluate(plain, testset);
        result.logs.push_back({epoch, "plain", plain_eval.accuracy, plain_eval.r_squared,
                               plain_ms});

        // encrypted epoch: per-sample forward/backward in parallel with a
        // deterministic merge (ciphertext addition is exact, so grouping does
        // not change the result), then one update and a refresh.
        auto enc_start = Clock::now();
        std::vector<std::unique_ptr<EncryptedLRModel>> workers;
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (size_t t = 0; t < threads; ++t) {
            workers.push_back(std::make_unique<EncryptedLRModel>(enc_model));
        }
        auto run_range = [&](size_t t) {
            try {
                EncryptedLRModel& local = *workers[t];
                for (size_t i = t; i < n; i += threads) {
                    uint64_t sample_seed = derive_seed(config.seed, epoch, i);
                    Ciphertext enc_x = encrypt_features(trainset.features[i], padded,
                                                        kp.public_key, *ctx, sample_seed);
                    Ciphertext enc_a = local.forward(enc_x, gk, rk);
                    Ciphertext enc_y;
                    if (config.encrypt_labels) {
                        Plaintext py = encode({trainset.labels[i]}, ctx->global_scale(), *ctx,
                                              true, enc_a.level);
                        enc_y = encrypt(py, kp.public_key, *ctx, derive_seed(sample_seed, 0x9));
                    } else {
                        // Plaintext labels: fold -y into the activation and
                        // hand backward a transparent zero.
                        Plaintext py = encode({-trainset.labels[i]}, ctx->global_scale(), *ctx,
                                              true, enc_a.level);
                        enc_a = add_plain(enc_a, py, *ctx);
                        enc_y = trivial_zero(*ctx, enc_a.level, enc_a.scale);
                    }
                    local.backward(enc_x, enc_a, enc_y, rk);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        if (threads == 1) {
            run_range(0);
        } else {
            for (size_t t = 0; t < threads; ++t) pool.emplace_back(run_range, t);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);
        for (auto& worker : workers) enc_model.absorb_gradients(*worker);

        enc_model.update_parameters(config.reg_coeff);
        LRModel snapshot = enc_model.decrypt_model(kp.secret);
        if (config.reencrypt_per_epoch) {
            enc_model.reencrypt(snapshot, derive_seed(config.seed, 0xee, epoch));
        }
        int64_t enc_ms = ms_since(enc_start);
        auto enc_eval = evaluate(snapshot, testset);
        result.logs.push_back({epoch, "encrypted", enc_eval.accuracy, enc_eval.r_squared,
                               enc_ms});
        result.encrypted_model = snapshot;
    }
    result.plain_model = plain;
    return result;
}

void write_training_log(const std::vector<EpochLog>& logs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << "epoch,mode,accuracy,r_squared,wall_time_ms\n";
    char buf[160];
    for (const auto& log : logs) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.12g,%.12g,%lld", log.epoch, log.mode.c_str(),
                      log.accuracy, log.r_squared, static_cast<long long>(log.wall_time_ms));
        out << buf << "\n";
    }
}

}  // namespace ckks::lr
