#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/numerics/optim.hpp"
#include "mtparse/trainer/config.hpp"
#include "mtparse/trainer/model.hpp"

namespace mtparse::trainer {

struct EpochRecord {
    int epoch = 0;
    long dp_steps = 0;
    long srl_steps = 0;
    double dp_loss = 0.0;   // mean J_dp over the epoch's DP steps (before λ_dp scaling)
    double srl_loss = 0.0;  // mean J_srl over the epoch's SRL steps
    std::optional<dp::DpMetrics> dp;
    std::optional<srl::SrlReport> srl;
    double target = 0.0;

    friend bool operator==(const EpochRecord& a, const EpochRecord& b);
};

struct TrainResult {
    std::vector<EpochRecord> history;
    int best_epoch = 0;  // 0: initialization kept
    double best_metric = 0.0;
    long skipped = 0;    // oversize training sentences
    long steps = 0;
};

struct TrainData {
    const std::vector<corpus::Sentence>* dp_train = nullptr;
    const std::vector<corpus::Sentence>* dp_dev = nullptr;
    const std::vector<corpus::Sentence>* srl_train = nullptr;
    const std::vector<corpus::Sentence>* srl_dev = nullptr;
};

/// Called after each epoch's validation; returning false stops training.
using EpochCallback = std::function<bool(const EpochRecord&)>;

struct TrainOptions {
    /// Token budget for training inputs; oversize sentences are skipped.
    int max_tokens = tokenize::kDefaultMaxTokens;
    /// Copy the best-validation parameters back into the model at the end.
    bool restore_best = true;
    EpochCallback on_epoch;
    /// Observes every task draw (true = SRL); used by sampling audits.
    std::function<void(bool)> on_draw;
};

/// "uas" for DP-only training, "micro_f1" otherwise, unless configured.
std::string resolve_target(const TrainConfig& config, Task task);

/// Shared training loop. Each step draws SRL with probability β_srl (taken
/// as 0 for DP-only and 1 for SRL-only training), takes that task's next
/// batch, and steps AdamW on the encoder plus the drawn head. An epoch is
/// one pass over the SRL batches (the DP batches for DP-only training); the
/// other task's batches cycle with a reshuffle on exhaustion. Validation
/// runs after every epoch on the dev sets.
TrainResult train(Model& model, const TrainConfig& config, Task task, const TrainData& data,
                  const TrainOptions& options = {});

TrainResult train_single(Model& model, const TrainConfig& config, Task task, const TrainData& data,
                         const TrainOptions& options = {});
TrainResult train_multitask(Model& model, const TrainConfig& config, const TrainData& data,
                            const TrainOptions& options = {});

nlohmann::json to_json(const EpochRecord& r);
nlohmann::json to_json(const TrainResult& r);

}  // namespace mtparse::trainer
