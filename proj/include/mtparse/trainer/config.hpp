#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtparse/tokenize/assemble.hpp"

namespace mtparse::trainer {

enum class Task { kDp, kSrl, kMulti };
const char* to_string(Task t);
Task parse_task(const std::string& s);

struct ModelConfig {
    int embed_dim = 64;
    int hidden = 128;
    int layers = 2;
    int max_tokens = tokenize::kDefaultMaxTokens;
    int dp_score_dim = 0;    // 0: same as hidden
    int srl_mlp_hidden = 0;  // 0: same as hidden
    double dropout_bert = 0.1;
    double dropout_dp = 0.1;
    double dropout_lstm = 0.1;
    bool use_bilstm = true;
    bool srl_predicate_segment = true;
    tokenize::DpMode dp_mode = tokenize::DpMode::kRootUnknown;
    tokenize::SrlSetting srl_setting = tokenize::SrlSetting::kMorpheme;
    /// Label inventories; filled from training data when empty.
    std::vector<std::string> dep_labels;
    std::vector<std::string> roles;

    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TokenizerConfig {
    int n_merges = 200;
    bool use_bpe = true;
    friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 0.01;
    double lambda_dp = 1.0;
    double beta_srl = 0.5;
    int batch_size = 32;
    int epochs = 10;
    std::uint64_t seed = 1;
    std::string target_metric;  // "uas" or "micro_f1"; empty picks by task
    int patience = 0;           // epochs without improvement before stopping; 0 disables
    std::optional<double> stop_at;  // stop once the target metric reaches this value

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct SearchDim {
    std::string name;
    bool log_scale = false;
    double low = 0.0;
    double high = 0.0;
    friend bool operator==(const SearchDim&, const SearchDim&) = default;
};

struct SearchSpace {
    std::vector<SearchDim> dims;
    void validate() const;
    /// Names accepted by apply_hyperparameter().
    static const std::vector<std::string>& known_names();
};

struct HpoConfig {
    int n_trials = 50;
    int epochs = 0;  // 0: 3 for DP, 10 for tasks involving SRL
    int max_tokens = 270;
    bool prune = true;
    int startup_trials = 1;  // completed trials needed before pruning starts
    SearchSpace space;
};

struct RunConfig {
    ModelConfig model;
    TokenizerConfig tokenizer;
    TrainConfig train;
    HpoConfig hpo;

    void validate() const;
};

/// Sets a named hyperparameter (learning_rate, weight_decay, lambda_dp,
/// beta_srl, dropout_bert, dropout_dp, dropout_lstm).
void apply_hyperparameter(RunConfig& config, const std::string& name, double value);
double get_hyperparameter(const RunConfig& config, const std::string& name);

// Strict JSON mapping: unknown keys and ill-typed values are ConfigErrors.
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TokenizerConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const HpoConfig& c);
nlohmann::json to_json(const RunConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);
TokenizerConfig tokenizer_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
HpoConfig hpo_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Defaults above plus the standard search space.
RunConfig default_run_config();

}  // namespace mtparse::trainer
