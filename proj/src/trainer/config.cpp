#include "mtparse/trainer/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "mtparse/error.hpp"

namespace mtparse::trainer {

using nlohmann::json;

const char* to_string(Task t) {
    switch (t) {
        case Task::kDp: return "dp";
        case Task::kSrl: return "srl";
        case Task::kMulti: return "multi";
    }
    return "?";
}

Task parse_task(const std::string& s) {
    if (s == "dp") return Task::kDp;
    if (s == "srl") return Task::kSrl;
    if (s == "multi") return Task::kMulti;
    throw ConfigError("unknown task '" + s + "' (expected dp, srl or multi)");
}

namespace {

void require_rate(double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1)");
}

// Checks that `j` is an object and only holds `allowed` keys.
void check_keys(const json& j, const char* block, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(block) + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(std::string(block) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* block, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError("");
        }
        out = it->get<T>();
    } catch (const std::exception&) {
        throw ConfigError(std::string(block) + "." + key + ": wrong type");
    }
}

}  // namespace

void ModelConfig::validate() const {
    if (embed_dim < 1) throw ConfigError("model.embed_dim must be >= 1");
    if (hidden < 2 || hidden % 2 != 0) throw ConfigError("model.hidden must be even and >= 2");
    if (layers < 1) throw ConfigError("model.layers must be >= 1");
    if (max_tokens < 4) throw ConfigError("model.max_tokens must be >= 4");
    if (dp_score_dim < 0) throw ConfigError("model.dp_score_dim must be >= 0");
    if (srl_mlp_hidden < 0) throw ConfigError("model.srl_mlp_hidden must be >= 0");
    require_rate(dropout_bert, "model.dropout_bert");
    require_rate(dropout_dp, "model.dropout_dp");
    require_rate(dropout_lstm, "model.dropout_lstm");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
    if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be >= 0");
    if (!(lambda_dp >= 0.0)) throw ConfigError("train.lambda_dp must be >= 0");
    if (!(beta_srl >= 0.0 && beta_srl <= 1.0)) throw ConfigError("train.beta_srl must lie in [0, 1]");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
    if (patience < 0) throw ConfigError("train.patience must be >= 0");
    if (!target_metric.empty() && target_metric != "uas" && target_metric != "micro_f1") {
        throw ConfigError("train.target_metric must be 'uas' or 'micro_f1'");
    }
}

const std::vector<std::string>& SearchSpace::known_names() {
    static const std::vector<std::string> names{"learning_rate", "weight_decay", "lambda_dp",   "beta_srl",
                                                "dropout_bert",  "dropout_dp",   "dropout_lstm"};
    return names;
}

void SearchSpace::validate() const {
    std::set<std::string> seen;
    for (const auto& d : dims) {
        const auto& known = known_names();
        if (std::find(known.begin(), known.end(), d.name) == known.end()) {
            throw ConfigError("search space: unknown hyperparameter '" + d.name + "'");
        }
        if (!seen.insert(d.name).second) throw ConfigError("search space: '" + d.name + "' listed twice");
        if (!(d.low <= d.high)) throw ConfigError("search space: '" + d.name + "' needs low <= high");
        if (d.log_scale && !(d.low > 0.0)) throw ConfigError("search space: '" + d.name + "' is logarithmic, low must be > 0");
    }
}

void RunConfig::validate() const {
    model.validate();
    train.validate();
    if (tokenizer.n_merges < 0) throw ConfigError("tokenizer.n_merges must be >= 0");
    if (hpo.n_trials < 1) throw ConfigError("hpo.n_trials must be >= 1");
    if (hpo.epochs < 0) throw ConfigError("hpo.epochs must be >= 0");
    if (hpo.max_tokens < 4) throw ConfigError("hpo.max_tokens must be >= 4");
    if (hpo.startup_trials < 0) throw ConfigError("hpo.startup_trials must be >= 0");
    hpo.space.validate();
}

void apply_hyperparameter(RunConfig& c, const std::string& name, double v) {
    if (name == "learning_rate") c.train.learning_rate = v;
    else if (name == "weight_decay") c.train.weight_decay = v;
    else if (name == "lambda_dp") c.train.lambda_dp = v;
    else if (name == "beta_srl") c.train.beta_srl = v;
    else if (name == "dropout_bert") c.model.dropout_bert = v;
    else if (name == "dropout_dp") c.model.dropout_dp = v;
    else if (name == "dropout_lstm") c.model.dropout_lstm = v;
    else throw ConfigError("unknown hyperparameter '" + name + "'");
}

double get_hyperparameter(const RunConfig& c, const std::string& name) {
    if (name == "learning_rate") return c.train.learning_rate;
    if (name == "weight_decay") return c.train.weight_decay;
    if (name == "lambda_dp") return c.train.lambda_dp;
    if (name == "beta_srl") return c.train.beta_srl;
    if (name == "dropout_bert") return c.model.dropout_bert;
    if (name == "dropout_dp") return c.model.dropout_dp;
    if (name == "dropout_lstm") return c.model.dropout_lstm;
    throw ConfigError("unknown hyperparameter '" + name + "'");
}

json to_json(const ModelConfig& c) {
    return {{"embed_dim", c.embed_dim},
            {"hidden", c.hidden},
            {"layers", c.layers},
            {"max_tokens", c.max_tokens},
            {"dp_score_dim", c.dp_score_dim},
            {"srl_mlp_hidden", c.srl_mlp_hidden},
            {"dropout_bert", c.dropout_bert},
            {"dropout_dp", c.dropout_dp},
            {"dropout_lstm", c.dropout_lstm},
            {"use_bilstm", c.use_bilstm},
            {"srl_predicate_segment", c.srl_predicate_segment},
            {"dp_mode", tokenize::to_string(c.dp_mode)},
            {"srl_setting", tokenize::to_string(c.srl_setting)},
            {"dep_labels", c.dep_labels},
            {"roles", c.roles}};
}

json to_json(const TokenizerConfig& c) { return {{"n_merges", c.n_merges}, {"use_bpe", c.use_bpe}}; }

json to_json(const TrainConfig& c) {
    json j{{"learning_rate", c.learning_rate}, {"weight_decay", c.weight_decay}, {"lambda_dp", c.lambda_dp},
           {"beta_srl", c.beta_srl},           {"batch_size", c.batch_size},     {"epochs", c.epochs},
           {"seed", c.seed},                   {"target_metric", c.target_metric}, {"patience", c.patience}};
    j["stop_at"] = c.stop_at ? json(*c.stop_at) : json(nullptr);
    return j;
}

json to_json(const HpoConfig& c) {
    json space = json::array();
    for (const auto& d : c.space.dims) {
        space.push_back({{"name", d.name}, {"scale", d.log_scale ? "log" : "linear"}, {"low", d.low}, {"high", d.high}});
    }
    return {{"n_trials", c.n_trials}, {"epochs", c.epochs},           {"max_tokens", c.max_tokens},
            {"prune", c.prune},       {"startup_trials", c.startup_trials}, {"space", space}};
}

json to_json(const RunConfig& c) {
    return {{"model", to_json(c.model)},
            {"tokenizer", to_json(c.tokenizer)},
            {"train", to_json(c.train)},
            {"hpo", to_json(c.hpo)}};
}

ModelConfig model_config_from_json(const json& j) {
    check_keys(j, "model",
               {"embed_dim", "hidden", "layers", "max_tokens", "dp_score_dim", "srl_mlp_hidden", "dropout_bert",
                "dropout_dp", "dropout_lstm", "use_bilstm", "srl_predicate_segment", "dp_mode", "srl_setting",
                "dep_labels", "roles"});
    ModelConfig c;
    read(j, "model", "embed_dim", c.embed_dim);
    read(j, "model", "hidden", c.hidden);
    read(j, "model", "layers", c.layers);
    read(j, "model", "max_tokens", c.max_tokens);
    read(j, "model", "dp_score_dim", c.dp_score_dim);
    read(j, "model", "srl_mlp_hidden", c.srl_mlp_hidden);
    read(j, "model", "dropout_bert", c.dropout_bert);
    read(j, "model", "dropout_dp", c.dropout_dp);
    read(j, "model", "dropout_lstm", c.dropout_lstm);
    read(j, "model", "use_bilstm", c.use_bilstm);
    read(j, "model", "srl_predicate_segment", c.srl_predicate_segment);
    std::string mode, setting;
    read(j, "model", "dp_mode", mode);
    read(j, "model", "srl_setting", setting);
    if (!mode.empty()) c.dp_mode = tokenize::parse_dp_mode(mode);
    if (!setting.empty()) c.srl_setting = tokenize::parse_srl_setting(setting);
    for (const char* key : {"dep_labels", "roles"}) {
        auto it = j.find(key);
        if (it == j.end()) continue;
        if (!it->is_array()) throw ConfigError(std::string("model.") + key + ": expected a list of strings");
        auto& dst = std::string(key) == "roles" ? c.roles : c.dep_labels;
        for (const auto& v : *it) {
            if (!v.is_string()) throw ConfigError(std::string("model.") + key + ": expected a list of strings");
            dst.push_back(v.get<std::string>());
        }
    }
    c.validate();
    return c;
}

TokenizerConfig tokenizer_config_from_json(const json& j) {
    check_keys(j, "tokenizer", {"n_merges", "use_bpe"});
    TokenizerConfig c;
    read(j, "tokenizer", "n_merges", c.n_merges);
    read(j, "tokenizer", "use_bpe", c.use_bpe);
    if (c.n_merges < 0) throw ConfigError("tokenizer.n_merges must be >= 0");
    return c;
}

TrainConfig train_config_from_json(const json& j) {
    check_keys(j, "train",
               {"learning_rate", "weight_decay", "lambda_dp", "beta_srl", "batch_size", "epochs", "seed",
                "target_metric", "patience", "stop_at"});
    TrainConfig c;
    read(j, "train", "learning_rate", c.learning_rate);
    read(j, "train", "weight_decay", c.weight_decay);
    read(j, "train", "lambda_dp", c.lambda_dp);
    read(j, "train", "beta_srl", c.beta_srl);
    read(j, "train", "batch_size", c.batch_size);
    read(j, "train", "epochs", c.epochs);
    read(j, "train", "seed", c.seed);
    read(j, "train", "target_metric", c.target_metric);
    read(j, "train", "patience", c.patience);
    if (auto it = j.find("stop_at"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) throw ConfigError("train.stop_at: wrong type");
        c.stop_at = it->get<double>();
    }
    c.validate();
    return c;
}

HpoConfig hpo_config_from_json(const json& j) {
    check_keys(j, "hpo", {"n_trials", "epochs", "max_tokens", "prune", "startup_trials", "space"});
    HpoConfig c = default_run_config().hpo;
    read(j, "hpo", "n_trials", c.n_trials);
    read(j, "hpo", "epochs", c.epochs);
    read(j, "hpo", "max_tokens", c.max_tokens);
    read(j, "hpo", "prune", c.prune);
    read(j, "hpo", "startup_trials", c.startup_trials);
    if (auto it = j.find("space"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("hpo.space: expected a list");
        c.space.dims.clear();
        for (const auto& d : *it) {
            check_keys(d, "hpo.space[]", {"name", "scale", "low", "high"});
            SearchDim dim;
            std::string scale = "linear";
            read(d, "hpo.space[]", "name", dim.name);
            read(d, "hpo.space[]", "scale", scale);
            read(d, "hpo.space[]", "low", dim.low);
            read(d, "hpo.space[]", "high", dim.high);
            if (scale != "linear" && scale != "log") throw ConfigError("hpo.space[]: scale must be 'linear' or 'log'");
            dim.log_scale = scale == "log";
            c.space.dims.push_back(dim);
        }
    }
    c.space.validate();
    return c;
}

RunConfig run_config_from_json(const json& j) {
    check_keys(j, "config", {"model", "tokenizer", "train", "hpo"});
    RunConfig c = default_run_config();
    if (j.contains("model")) c.model = model_config_from_json(j["model"]);
    if (j.contains("tokenizer")) c.tokenizer = tokenizer_config_from_json(j["tokenizer"]);
    if (j.contains("train")) c.train = train_config_from_json(j["train"]);
    if (j.contains("hpo")) c.hpo = hpo_config_from_json(j["hpo"]);
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

RunConfig default_run_config() {
    RunConfig c;
    c.hpo.space.dims = {{"learning_rate", true, 1e-4, 1e-2}, {"dropout_bert", false, 0.0, 0.5},
                        {"dropout_dp", false, 0.0, 0.5},     {"dropout_lstm", false, 0.0, 0.5},
                        {"lambda_dp", true, 1e-2, 10.0},     {"beta_srl", false, 0.1, 0.9}};
    return c;
}

}  // namespace mtparse::trainer
