// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ckkslab/data_io.hpp"
#include "ckkslab/scheme.hpp"

namespace ckks::lr {

struct LRModel {
    std::vector<double> w;
    double b = 0.0;
};

LRModel initialize_lr(size_t n_features, uint64_t seed);

// Exact sigmoid of w.x + b.
double forward_plain(const LRModel& model, const std::vector<double>& x);

// The degree-3 activation used under encryption: 0.5 + 0.197 x - 0.004 x^3.
double sigmoid_approx(double x);

struct TrainConfig {
    size_t epochs = 5;
    double reg_coeff = 0.05;
    uint64_t seed = 0;
    std::string preset;            // empty -> training default
    bool reencrypt_per_epoch = true;
    bool encrypt_labels = true;
    size_t threads = 0;            // 0 -> hardware concurrency
};

struct EpochLog {
    size_t epoch = 0;
    std::string mode;  // "plain" | "encrypted"
    double accuracy = 0.0;
    double r_squared = 0.0;
    int64_t wall_time_ms = 0;
};

struct EvalResult {
    double accuracy = 0.0;
    double r_squared = 0.0;
};

// Exact-sigmoid evaluation of a (decrypted) model on a test set.
EvalResult evaluate(const LRModel& model, const data::Dataset& testset);

// Encrypted model state: packed weights/bias plus gradient accumulators.
class EncryptedLRModel {
public:
    EncryptedLRModel(const LRModel& init, const KeyPair& keys,
                     std::shared_ptr<const CkksContext> ctx, uint64_t seed);

    // a <- polyval(dot(w, x) + b); consumes three levels.
    Ciphertext forward(const Ciphertext& enc_x, const GaloisKeys& gk, const RelinKey& rk) const;

    // Accumulates x * (a - y) into delta_w and (a - y) into delta_b.
    void backward(const Ciphertext& enc_x, const Ciphertext& enc_a, const Ciphertext& enc_y,
                  const RelinKey& rk);

    // w <- (1 - reg) w - delta_w / count, b <- b - delta_b / count; resets the
    // accumulators. Throws NoAccumulatedGradients when count == 0.
    void update_parameters(double reg_coeff);

    // Decrypts the parameters (weights to feature count, bias).
    LRModel decrypt_model(const SecretKey& sk) const;
    // Replaces the encrypted parameters with fresh top-level encryptions.
    void reencrypt(const LRModel& model, uint64_t seed);

    // Merges another model's accumulated gradients (parallel training).
    void absorb_gradients(const EncryptedLRModel& other);

    size_t count() const { return count_; }
    size_t feature_count() const { return n_features_; }
    size_t padded_len() const { return padded_; }
    const Ciphertext& enc_w() const { return enc_w_; }
    const Ciphertext& enc_b() const { return enc_b_; }

    // Testing hook: pretend `count` backward passes happened with the current
    // (zero-initialized) accumulators.
    void force_count(size_t count) { count_ = count; }

private:
    void reset_accumulators();

    std::shared_ptr<const CkksContext> ctx_;
    KeyPair keys_;
    size_t n_features_ = 0;
    size_t padded_ = 0;
    uint64_t seed_ = 0;
    uint64_t op_counter_ = 0;
    Ciphertext enc_w_, enc_b_;
    Ciphertext delta_w_, delta_b_;
    size_t count_ = 0;
};

struct TrainResult {
    LRModel plain_model;        // the plain-arithmetic twin
    LRModel encrypted_model;    // decrypted final encrypted-mode parameters
    std::vector<EpochLog> logs; // plain and encrypted rows, epoch-ordered
};

// Full-batch training of the encrypted model alongside its plain twin. Both
// use the polynomial activation; they differ only in arithmetic (exact vs
// encrypted), so divergence measures encryption error.
TrainResult train(const data::Dataset& trainset, const data::Dataset& testset,
                  const TrainConfig& config);

// Packs a feature vector for the replicated-fold pipeline.
Ciphertext encrypt_features(const std::vector<double>& x, size_t padded, const PublicKey& pk,
                            const CkksContext& ctx, uint64_t seed);

void write_training_log(const std::vector<EpochLog>& logs, const std::string& path);

}  // namespace ckks::lr
