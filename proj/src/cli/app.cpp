#include "mtparse/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mtparse/corpus/io.hpp"
#include "mtparse/corpus/split.hpp"
#include "mtparse/corpus/synthetic.hpp"
#include "mtparse/error.hpp"
#include "mtparse/trainer/hpo.hpp"
#include "mtparse/trainer/manifest.hpp"
#include "mtparse/trainer/model.hpp"
#include "mtparse/trainer/report.hpp"
#include "mtparse/trainer/train.hpp"

namespace mtparse::cli {

using nlohmann::json;
using trainer::RunConfig;
using trainer::Task;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs;
    std::string dp_mode;
    std::string setting;
    bool no_srl_predicate = false;
    bool no_bpe = false;
    bool no_bilstm = false;
    bool no_dp_predicate = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Run configuration (JSON)");
    cmd->add_option("--seed", c.seed, "Override train.seed");
    cmd->add_option("--epochs", c.epochs, "Override train.epochs");
    cmd->add_option("--dp-mode", c.dp_mode, "root_unknown or root_known");
    cmd->add_option("--setting", c.setting, "SRL setting: morpheme or span_given");
    cmd->add_flag("--no-srl-predicate", c.no_srl_predicate, "Drop the appended predicate segment from SRL inputs");
    cmd->add_flag("--no-bpe", c.no_bpe, "Use whole SUWs as tokens");
    cmd->add_flag("--no-bilstm", c.no_bilstm, "Feed encoder outputs straight to the SRL classifier");
    cmd->add_flag("--no-dp-predicate", c.no_dp_predicate, "Use the root_unknown DP input");
}

RunConfig resolve_config(const Common& c) {
    RunConfig cfg = c.config.empty() ? trainer::default_run_config() : trainer::load_run_config(c.config);
    if (c.seed) cfg.train.seed = *c.seed;
    if (c.epochs) cfg.train.epochs = *c.epochs;
    if (!c.dp_mode.empty()) cfg.model.dp_mode = tokenize::parse_dp_mode(c.dp_mode);
    if (!c.setting.empty()) cfg.model.srl_setting = tokenize::parse_srl_setting(c.setting);
    if (c.no_srl_predicate) cfg.model.srl_predicate_segment = false;
    if (c.no_bpe) cfg.tokenizer.use_bpe = false;
    if (c.no_bilstm) cfg.model.use_bilstm = false;
    if (c.no_dp_predicate) cfg.model.dp_mode = tokenize::DpMode::kRootUnknown;
    cfg.validate();
    return cfg;
}

std::vector<std::string> ablation_names(const RunConfig& cfg, Task task) {
    std::vector<std::string> out;
    if (task != Task::kDp && !cfg.model.srl_predicate_segment) out.push_back("- SRL predicate");
    if (!cfg.tokenizer.use_bpe) out.push_back("- BPE");
    if (task != Task::kDp && !cfg.model.use_bilstm) out.push_back("- BiLSTM");
    if (task == Task::kMulti && cfg.model.dp_mode == tokenize::DpMode::kRootUnknown) out.push_back("- DP predicate");
    return out;
}

std::string run_name(const std::vector<std::string>& ablations) {
    if (ablations.empty()) return "full";
    std::string s;
    for (const auto& a : ablations) s += (s.empty() ? "" : " ") + a;
    return s;
}

json base_manifest(const std::string& command, const std::map<std::string, std::string>& data_files) {
    json data = json::object();
    for (const auto& [role, path] : data_files) {
        if (!path.empty()) data[role] = {{"path", fs::path(path).filename().string()}, {"sha1", trainer::git_blob_hash_file(path)}};
    }
    return {{"command", command}, {"toolkit_version", trainer::kToolkitVersion}, {"data", data}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Manifest next to an artifact: <artifact>.manifest.json.
std::string write_sidecar(const fs::path& artifact, json manifest) {
    trainer::seal_manifest(manifest);
    write_json(fs::path(artifact.string() + ".manifest.json"), manifest);
    return manifest["manifest_hash"].get<std::string>();
}

/// JSONL with a manifest_hash key on every record.
void write_jsonl_tagged(const fs::path& path, const std::vector<corpus::Sentence>& data, const std::string& hash) {
    std::ostringstream ss;
    corpus::write_srl_jsonl(ss, data);
    std::istringstream in(ss.str());
    std::string line, text;
    while (std::getline(in, line)) {
        json j = json::parse(line);
        j["manifest_hash"] = hash;
        text += j.dump() + "\n";
    }
    write_text(path, text);
}

void write_corpus(const fs::path& path, const std::vector<corpus::Sentence>& data, const std::string& hash) {
    const std::string name = path.filename().string();
    if (name.find(".conll") != std::string::npos) {
        corpus::write_conllu(path, data, "manifest_hash = " + hash);
    } else {
        write_jsonl_tagged(path, data, hash);
    }
}

std::vector<corpus::Sentence> load(const std::string& path) {
    if (path.empty()) return {};
    return corpus::read_any(path);
}

tokenize::SubwordModel make_tokenizer(const RunConfig& cfg, const std::string& path,
                                      const std::vector<const std::vector<corpus::Sentence>*>& sources) {
    if (!path.empty()) {
        auto tok = tokenize::SubwordModel::load(fs::path(path));
        const bool atomic = tok.mode() == tokenize::SubwordModel::Mode::kAtomic;
        if (atomic == cfg.tokenizer.use_bpe) {
            throw ConfigError("tokenizer " + path + (atomic ? " is atomic but BPE was requested" : " is BPE but --no-bpe was given"));
        }
        return tok;
    }
    std::vector<corpus::Sentence> all;
    for (const auto* s : sources) {
        if (s) all.insert(all.end(), s->begin(), s->end());
    }
    return cfg.tokenizer.use_bpe ? tokenize::learn_subwords(all, cfg.tokenizer.n_merges)
                                 : tokenize::learn_atomic_vocabulary(all);
}

void fill_labels(RunConfig& cfg, Task task, const std::vector<corpus::Sentence>& dp_train,
                 const std::vector<corpus::Sentence>& srl_train) {
    if (task != Task::kSrl && cfg.model.dep_labels.empty()) cfg.model.dep_labels = trainer::collect_dep_labels(dp_train);
    if (task != Task::kDp && cfg.model.roles.empty()) cfg.model.roles = trainer::collect_roles(srl_train);
    if (task != Task::kSrl && cfg.model.dep_labels.empty()) throw DataError("DP training data carries no dependency labels");
    if (task != Task::kDp && cfg.model.roles.empty()) throw DataError("SRL training data carries no roles");
    if (task == Task::kDp) cfg.model.roles.clear();
    if (task == Task::kSrl) cfg.model.dep_labels.clear();
}

// ---- commands -------------------------------------------------------------

struct GenSynthArgs {
    corpus::SynthConfig synth;
    std::uint64_t seed = 1;
    std::string out, conllu;
};

int cmd_gen_synth(const GenSynthArgs& a, std::ostream& out) {
    a.synth.validate();
    const auto data = corpus::generate_synthetic(a.synth, a.seed);
    json m = base_manifest("gen-synth", {});
    m["seed"] = a.seed;
    m["config"] = {{"n_sentences", a.synth.n_sentences}, {"vocab_size", a.synth.vocab_size},
                   {"n_roles", a.synth.n_roles},         {"min_args", a.synth.min_args},
                   {"max_args", a.synth.max_args},       {"id_prefix", a.synth.id_prefix}};
    const std::string hash = write_sidecar(a.out, m);
    write_corpus(a.out, data, hash);
    if (!a.conllu.empty()) write_corpus(a.conllu, data, hash);
    out << "wrote " << data.size() << " sentences to " << a.out << "\n";
    return kOk;
}

struct SplitArgs {
    std::string dp, srl, ratios = "80:10:10", dp_out, srl_out, shared_map;
    std::uint64_t seed = 1;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
    if (a.dp.empty() && a.srl.empty()) throw ConfigError("split needs --dp and/or --srl");
    corpus::SplitSpec spec;
    spec.ratios = corpus::SplitSpec::parse_ratios(a.ratios);
    if (!a.shared_map.empty()) {
        std::ifstream in(a.shared_map);
        if (!in) throw DataError("cannot open " + a.shared_map);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw DataError("expected <id>\\t<split>", lineno);
            try {
                spec.shared_sentence_map[line.substr(0, tab)] = corpus::parse_split_name(line.substr(tab + 1));
            } catch (const ConfigError& e) {
                throw DataError(e.what(), lineno);
            }
        }
    }
    const auto dp = load(a.dp);
    const auto srl = load(a.srl);
    auto [dp_splits, srl_splits] = corpus::split_leak_safe(dp, srl, spec, a.seed);
    json m = base_manifest("split", {{"dp", a.dp}, {"srl", a.srl}, {"shared_map", a.shared_map}});
    m["seed"] = a.seed;
    m["ratios"] = spec.ratios;
    auto emit = [&](const std::string& src, const std::string& stem_opt, const corpus::Splits& s, const char* what) {
        if (src.empty()) return;
        // <stem>.<split><ext>, keeping the input format
        const fs::path src_path(src);
        const std::string ext = src_path.extension().string();
        const std::string stem =
            stem_opt.empty() ? (src_path.parent_path() / src_path.stem()).string() : stem_opt;
        const std::string hash = write_sidecar(stem, m);
        for (auto name : {corpus::SplitName::kTrain, corpus::SplitName::kDev, corpus::SplitName::kTest}) {
            write_corpus(stem + "." + corpus::to_string(name) + ext, s[name], hash);
        }
        out << what << ": " << s[corpus::SplitName::kTrain].size() << "/" << s[corpus::SplitName::kDev].size() << "/"
            << s[corpus::SplitName::kTest].size() << "\n";
    };
    emit(a.dp, a.dp_out, dp_splits, "dp");
    emit(a.srl, a.srl_out, srl_splits, "srl");
    return kOk;
}

struct LearnBpeArgs {
    std::vector<std::string> data;
    int merges = 200;
    bool atomic = false;
    std::string out;
};

int cmd_learn_bpe(const LearnBpeArgs& a, std::ostream& out) {
    if (a.merges < 0) throw ConfigError("--merges must be >= 0");
    std::vector<corpus::Sentence> all;
    std::map<std::string, std::string> files;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        auto part = corpus::read_any(a.data[i]);
        all.insert(all.end(), part.begin(), part.end());
        files["data" + std::to_string(i)] = a.data[i];
    }
    const auto tok = a.atomic ? tokenize::learn_atomic_vocabulary(all) : tokenize::learn_subwords(all, a.merges);
    tok.save(fs::path(a.out));
    json m = base_manifest("learn-bpe", files);
    m["config"] = {{"n_merges", a.merges}, {"atomic", a.atomic}};
    write_sidecar(a.out, m);
    out << "learned " << tok.merges().size() << " merges, " << tok.vocab_size() << " tokens\n";
    return kOk;
}

struct TrainArgs {
    Common common;
    std::string task = "dp";
    std::string train, dev, dp_train, dp_dev, srl_train, srl_dev, tokenizer, out;
};

json train_manifest(const std::string& command, const RunConfig& cfg, Task task,
                    const std::map<std::string, std::string>& files) {
    json m = base_manifest(command, files);
    m["task"] = trainer::to_string(task);
    m["config"] = trainer::to_json(cfg);
    m["ablations"] = ablation_names(cfg, task);
    m["seed"] = cfg.train.seed;
    return m;
}

int run_training(const TrainArgs& a, Task task, const std::string& command, std::ostream& out) {
    RunConfig cfg = resolve_config(a.common);
    const std::string dp_train_path = task == Task::kMulti ? a.dp_train : (task == Task::kDp ? a.train : "");
    const std::string dp_dev_path = task == Task::kMulti ? a.dp_dev : (task == Task::kDp ? a.dev : "");
    const std::string srl_train_path = task == Task::kMulti ? a.srl_train : (task == Task::kSrl ? a.train : "");
    const std::string srl_dev_path = task == Task::kMulti ? a.srl_dev : (task == Task::kSrl ? a.dev : "");
    const auto dp_train = load(dp_train_path), dp_dev = load(dp_dev_path);
    const auto srl_train = load(srl_train_path), srl_dev = load(srl_dev_path);
    fill_labels(cfg, task, dp_train, srl_train);
    const auto tok = make_tokenizer(cfg, a.tokenizer, {&dp_train, &srl_train});

    trainer::Model model(cfg.model, tok, cfg.train.seed);
    trainer::TrainData data{&dp_train, &dp_dev, &srl_train, &srl_dev};
    trainer::TrainOptions opt;
    opt.max_tokens = cfg.model.max_tokens;
    opt.on_epoch = [&out](const trainer::EpochRecord& r) {
        out << "epoch " << r.epoch << " target " << r.target << "\n";
        return true;
    };
    const auto result = trainer::train(model, cfg.train, task, data, opt);

    json m = train_manifest(command, cfg, task,
                            {{"dp_train", dp_train_path}, {"dp_dev", dp_dev_path}, {"srl_train", srl_train_path},
                             {"srl_dev", srl_dev_path}, {"tokenizer", a.tokenizer}});
    m["best_epoch"] = result.best_epoch;
    m["best_metric"] = result.best_metric;
    const std::string hash = trainer::save_model(a.out, model, m);
    json history = trainer::to_json(result);
    history["manifest_hash"] = hash;
    write_json(a.out + ".history.json", history);
    out << "best epoch " << result.best_epoch << " target " << result.best_metric << "\n";
    return kOk;
}

struct HpoArgs {
    Common common;
    std::string task = "dp";
    std::string dp_train, dp_dev, srl_train, srl_dev, tokenizer, log, best_out;
    std::optional<int> trials;
    bool force_complete = false;
};

int cmd_hpo(const HpoArgs& a, std::ostream& out) {
    const Task task = trainer::parse_task(a.task);
    RunConfig cfg = resolve_config(a.common);
    if (a.trials) cfg.hpo.n_trials = *a.trials;
    cfg.validate();
    const auto dp_train = load(task != Task::kSrl ? a.dp_train : ""), dp_dev = load(task != Task::kSrl ? a.dp_dev : "");
    const auto srl_train = load(task != Task::kDp ? a.srl_train : ""), srl_dev = load(task != Task::kDp ? a.srl_dev : "");
    fill_labels(cfg, task, dp_train, srl_train);
    const auto tok = make_tokenizer(cfg, a.tokenizer, {&dp_train, &srl_train});
    trainer::TrainData data{&dp_train, &dp_dev, &srl_train, &srl_dev};

    json m = train_manifest("hpo", cfg, task,
                            {{"dp_train", task != Task::kSrl ? a.dp_train : ""}, {"dp_dev", task != Task::kSrl ? a.dp_dev : ""},
                             {"srl_train", task != Task::kDp ? a.srl_train : ""}, {"srl_dev", task != Task::kDp ? a.srl_dev : ""},
                             {"tokenizer", a.tokenizer}});
    trainer::seal_manifest(m);
    const std::string hash = m["manifest_hash"];

    std::ostringstream log;
    trainer::HpoOptions opt;
    opt.force_complete = a.force_complete;
    opt.log = &log;
    const auto result = trainer::hpo_search(cfg, task, tok, data, opt);

    std::string tagged;
    {
        std::istringstream in(log.str());
        std::string line;
        while (std::getline(in, line)) {
            json j = json::parse(line);
            j["manifest_hash"] = hash;
            tagged += j.dump() + "\n";
        }
    }
    if (!a.log.empty()) {
        write_text(a.log, tagged);
        write_json(a.log + ".manifest.json", m);
    }
    if (!a.best_out.empty()) {
        json best = trainer::to_json(result.best_config);
        best["model"].erase("dep_labels");
        best["model"].erase("roles");
        write_json(a.best_out, best);
    }
    const auto& b = result.trials[result.best_trial];
    out << "best trial " << b.id << " target " << b.best_metric << "\n";
    for (const auto& [name, value] : b.sampled) out << "  " << name << " = " << value << "\n";
    return kOk;
}

struct EvalArgs {
    std::vector<std::string> checkpoints;
    std::string data, task, root_from, out, csv, name, predictions, gold, setting;
};

Task infer_task(trainer::Model& model, const std::string& requested) {
    if (!requested.empty()) {
        const Task t = trainer::parse_task(requested);
        if (t == Task::kMulti) throw ConfigError("--task must be dp or srl for evaluation");
        if (t == Task::kDp && !model.has_dp()) throw ConfigError("checkpoint has no dependency head");
        if (t == Task::kSrl && !model.has_srl()) throw ConfigError("checkpoint has no SRL head");
        return t;
    }
    return model.has_srl() ? Task::kSrl : Task::kDp;
}

json metrics_json(const dp::DpMetrics& m) { return trainer::to_json(m); }

void add_metrics(trainer::RunSummary& s, const json& metrics, Task task) {
    const std::vector<std::string> keys =
        task == Task::kDp ? std::vector<std::string>{"uas", "las", "root"}
                          : std::vector<std::string>{"micro_precision", "micro_recall", "micro_f1", "macro_precision",
                                                     "macro_recall", "macro_f1", "identification_f1", "accuracy"};
    for (const auto& k : keys) s.metrics[k].push_back(metrics.at(k).get<double>());
}

std::vector<std::string> table_metrics(Task task, tokenize::SrlSetting setting) {
    if (task == Task::kDp) return {"uas", "las", "root"};
    if (setting == tokenize::SrlSetting::kSpanGiven) return {"micro_f1", "accuracy"};
    return {"micro_f1", "macro_f1", "identification_f1", "accuracy"};
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    json report;
    trainer::RunSummary summary;
    Task task = Task::kDp;
    tokenize::SrlSetting setting = tokenize::SrlSetting::kMorpheme;
    std::optional<srl::SrlReport> first_srl;

    if (!a.predictions.empty()) {
        if (!a.checkpoints.empty()) throw ConfigError("use either --checkpoint or --predictions");
        if (a.gold.empty() || a.task.empty()) throw ConfigError("--predictions needs --gold and --task");
        task = trainer::parse_task(a.task);
        if (!a.setting.empty()) setting = tokenize::parse_srl_setting(a.setting);
        json metrics;
        if (task == Task::kDp) {
            const bool conll = a.predictions.find(".conll") != std::string::npos;
            const auto pred = conll ? corpus::read_conllu(a.predictions, false) : corpus::read_any(a.predictions);
            const auto gold = corpus::read_any(a.gold);
            std::vector<dp::DpPrediction> p;
            for (const auto& s : pred) {
                if (!s.heads) throw DataError("prediction " + s.id + " has no heads");
                p.push_back({*s.heads, *s.dep_labels, dp::has_cycle(*s.heads)});
            }
            metrics = metrics_json(dp::evaluate_dp(p, gold));
        } else if (task == Task::kSrl) {
            const auto pred = corpus::read_srl_jsonl(a.predictions);
            const auto gold = corpus::read_srl_jsonl(a.gold);
            auto r = srl::evaluate_srl(trainer::gold_frames(pred, setting), trainer::gold_frames(gold, setting), setting);
            metrics = trainer::to_json(r);
            first_srl = r;
        } else {
            throw ConfigError("--task must be dp or srl for evaluation");
        }
        report["runs"] = json::array({metrics});
        add_metrics(summary, metrics, task);
        summary.name = a.name.empty() ? "predictions" : a.name;
        summary.setting = {{"task", trainer::to_string(task)},
                           {"setting", task == Task::kDp ? "dp" : tokenize::to_string(setting)},
                           {"data_sha1", trainer::git_blob_hash_file(a.gold)}};
    } else {
        if (a.checkpoints.empty()) throw ConfigError("eval needs --checkpoint or --predictions");
        if (a.data.empty()) throw ConfigError("eval needs --data");
        const auto data = corpus::read_any(a.data);
        std::optional<std::vector<int>> roots;
        if (!a.root_from.empty()) {
            auto rm = trainer::load_model(a.root_from);
            roots = trainer::predict_roots(*rm.model, data);
        }
        json runs = json::array(), hashes = json::array();
        std::vector<std::string> names;
        for (const auto& ck : a.checkpoints) {
            auto loaded = trainer::load_model(ck);
            auto& model = *loaded.model;
            const Task t = infer_task(model, a.task);
            if (!runs.empty() && t != task) throw ConfigError("checkpoints disagree on the evaluated task");
            task = t;
            setting = model.config().srl_setting;
            json metrics;
            if (task == Task::kDp) {
                if (model.config().dp_mode == tokenize::DpMode::kRootKnown && !roots) {
                    std::cerr << "warning: " << ck << " is root_known and no --root-from model was given; using gold roots\n";
                }
                metrics = metrics_json(trainer::evaluate_dp_model(model, data, roots ? &*roots : nullptr));
            } else {
                auto r = trainer::evaluate_srl_model(model, data);
                metrics = trainer::to_json(r);
                if (!first_srl) first_srl = r;
            }
            runs.push_back(metrics);
            add_metrics(summary, metrics, task);
            hashes.push_back(loaded.manifest.value("manifest_hash", ""));
            std::vector<std::string> abl;
            for (const auto& x : loaded.manifest.value("ablations", json::array())) abl.push_back(x.get<std::string>());
            names.push_back(run_name(abl));
        }
        summary.name = a.name.empty() ? names.front() : a.name;
        summary.setting = {{"task", trainer::to_string(task)},
                           {"setting", task == Task::kDp ? "dp" : tokenize::to_string(setting)},
                           {"data_sha1", trainer::git_blob_hash_file(a.data)}};
        report["runs"] = runs;
        report["manifest_hashes"] = hashes;
    }

    const auto metrics = table_metrics(task, setting);
    const std::string table = trainer::multi_seed_table(std::span<const trainer::RunSummary>(&summary, 1), metrics);
    report["task"] = trainer::to_string(task);
    report["summary"] = trainer::to_json(summary);
    report["table"] = table;
    if (!a.out.empty()) write_json(a.out, report);
    if (!a.csv.empty()) {
        if (!first_srl) throw ConfigError("--csv applies to SRL evaluation");
        std::ostringstream ss;
        srl::write_label_csv(ss, *first_srl);
        write_text(a.csv, ss.str());
    }
    out << table;
    return kOk;
}

struct PredictArgs {
    std::string checkpoint, data, task, root_from, out, setting;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    auto loaded = trainer::load_model(a.checkpoint);
    auto& model = *loaded.model;
    const Task task = infer_task(model, a.task);
    if (!a.setting.empty() && task == Task::kSrl &&
        tokenize::parse_srl_setting(a.setting) != model.config().srl_setting) {
        throw ConfigError(std::string("checkpoint was trained for the ") + tokenize::to_string(model.config().srl_setting) +
                          " setting");
    }
    auto data = corpus::read_any(a.data);
    const std::string hash = loaded.manifest.value("manifest_hash", "");
    if (task == Task::kDp) {
        std::optional<std::vector<int>> roots;
        if (!a.root_from.empty()) {
            auto rm = trainer::load_model(a.root_from);
            roots = trainer::predict_roots(*rm.model, data);
        } else if (model.config().dp_mode == tokenize::DpMode::kRootKnown) {
            throw ConfigError("root_known prediction needs --root-from <root_unknown checkpoint>");
        }
        const auto pred = trainer::predict_dp(model, data, roots ? &*roots : nullptr);
        for (std::size_t k = 0; k < data.size(); ++k) {
            data[k].heads = pred[k].heads;
            data[k].dep_labels = pred[k].labels;
        }
        write_corpus(a.out, data, hash);
        out << "predicted trees for " << data.size() << " sentences\n";
    } else {
        const auto pred = trainer::predict_srl(model, data);
        const auto setting = model.config().srl_setting;
        std::size_t k = 0;
        for (auto& s : data) {
            if (!s.frames) continue;
            for (auto& f : *s.frames) {
                if (setting == tokenize::SrlSetting::kSpanGiven && f.arguments.empty()) continue;
                f.arguments = pred.at(k++).arguments;
            }
        }
        write_jsonl_tagged(a.out, data, hash);
        out << "predicted " << k << " frames\n";
    }
    return kOk;
}

struct AblationArgs {
    std::vector<std::string> runs;
    std::vector<std::string> metrics;
    std::string out;
};

int cmd_ablation(const AblationArgs& a, std::ostream& out) {
    std::vector<trainer::RunSummary> runs;
    for (const auto& path : a.runs) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw DataError(path + ": " + e.what());
        }
        runs.push_back(trainer::run_summary_from_json(j.contains("summary") ? j["summary"] : j));
    }
    std::vector<std::string> metrics = a.metrics;
    if (metrics.empty()) {
        const auto& s = runs.front().setting;
        auto it = s.find("task");
        metrics = it != s.end() && it->second == "dp" ? std::vector<std::string>{"uas", "las", "root"}
                                                      : std::vector<std::string>{"micro_f1", "macro_f1"};
    }
    const std::string table = trainer::ablation_table(runs, metrics);
    if (!a.out.empty()) write_text(a.out, table);
    out << table;
    return kOk;
}

int fail(std::ostream& err, const char* kind, const std::string& message, int code) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multitask dependency parsing and semantic role labeling toolkit", "mtparse"};
    app.require_subcommand(1);
    app.set_version_flag("--version", trainer::kToolkitVersion);

    GenSynthArgs gen;
    auto* c_gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
    c_gen->add_option("--out", gen.out, "Output corpus (.jsonl or .conllu)")->required();
    c_gen->add_option("--conllu", gen.conllu, "Also write CoNLL-U here");
    c_gen->add_option("--n", gen.synth.n_sentences, "Number of sentences");
    c_gen->add_option("--vocab", gen.synth.vocab_size, "Distinct SUW surfaces");
    c_gen->add_option("--roles", gen.synth.n_roles, "Role inventory size");
    c_gen->add_option("--min-args", gen.synth.min_args);
    c_gen->add_option("--max-args", gen.synth.max_args);
    c_gen->add_option("--prefix", gen.synth.id_prefix, "Sentence id prefix");
    c_gen->add_option("--seed", gen.seed);

    SplitArgs split;
    auto* c_split = app.add_subcommand("split", "Leak-safe train/dev/test split of paired corpora");
    c_split->add_option("--dp", split.dp, "DP corpus");
    c_split->add_option("--srl", split.srl, "SRL corpus");
    c_split->add_option("--ratios", split.ratios, "train:dev:test ratios");
    c_split->add_option("--dp-out", split.dp_out, "Output stem for the DP splits");
    c_split->add_option("--srl-out", split.srl_out, "Output stem for the SRL splits");
    c_split->add_option("--shared-map", split.shared_map, "Lines of <sentence id>\\t<train|dev|test>");
    c_split->add_option("--seed", split.seed);

    LearnBpeArgs bpe;
    auto* c_bpe = app.add_subcommand("learn-bpe", "Learn a subword vocabulary");
    c_bpe->add_option("--data", bpe.data, "Corpus files")->required();
    c_bpe->add_option("--merges", bpe.merges, "Number of merges");
    c_bpe->add_flag("--atomic", bpe.atomic, "Whole-SUW vocabulary");
    c_bpe->add_option("--out", bpe.out, "Output model file")->required();

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train a single-task model");
    add_common(c_train, tr.common);
    c_train->add_option("--task", tr.task, "dp or srl")->check(CLI::IsMember({"dp", "srl"}));
    c_train->add_option("--train", tr.train, "Training corpus")->required();
    c_train->add_option("--dev", tr.dev, "Validation corpus")->required();
    c_train->add_option("--tokenizer", tr.tokenizer, "Subword model (learned from the training data if absent)")
        ;
    c_train->add_option("--out", tr.out, "Checkpoint path")->required();

    TrainArgs multi;
    auto* c_multi = app.add_subcommand("train-multi", "Train the multitask DP+SRL model");
    add_common(c_multi, multi.common);
    c_multi->add_option("--dp-train", multi.dp_train)->required();
    c_multi->add_option("--dp-dev", multi.dp_dev);
    c_multi->add_option("--srl-train", multi.srl_train)->required();
    c_multi->add_option("--srl-dev", multi.srl_dev)->required();
    c_multi->add_option("--tokenizer", multi.tokenizer);
    c_multi->add_option("--out", multi.out, "Checkpoint path")->required();

    HpoArgs hpo;
    auto* c_hpo = app.add_subcommand("hpo", "Random hyperparameter search with median pruning");
    add_common(c_hpo, hpo.common);
    c_hpo->add_option("--task", hpo.task, "dp, srl or multi")->check(CLI::IsMember({"dp", "srl", "multi"}));
    c_hpo->add_option("--dp-train", hpo.dp_train);
    c_hpo->add_option("--dp-dev", hpo.dp_dev);
    c_hpo->add_option("--srl-train", hpo.srl_train);
    c_hpo->add_option("--srl-dev", hpo.srl_dev);
    c_hpo->add_option("--tokenizer", hpo.tokenizer);
    c_hpo->add_option("--trials", hpo.trials, "Override hpo.n_trials");
    c_hpo->add_option("--log", hpo.log, "Trial log (JSONL)");
    c_hpo->add_option("--best-out", hpo.best_out, "Best configuration (JSON)");
    c_hpo->add_flag("--force-complete", hpo.force_complete, "Finish pruned trials for auditing");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Evaluate checkpoints or prediction files");
    c_eval->add_option("--checkpoint", ev.checkpoints, "One or more checkpoints (seeds of one configuration)")
        ;
    c_eval->add_option("--data", ev.data, "Gold corpus");
    c_eval->add_option("--task", ev.task, "dp or srl");
    c_eval->add_option("--root-from", ev.root_from, "root_unknown DP checkpoint supplying root tokens")
        ;
    c_eval->add_option("--predictions", ev.predictions, "Predicted corpus");
    c_eval->add_option("--gold", ev.gold, "Gold corpus for --predictions");
    c_eval->add_option("--setting", ev.setting, "SRL setting for --predictions");
    c_eval->add_option("--name", ev.name, "Run name in reports");
    c_eval->add_option("--out", ev.out, "Report JSON");
    c_eval->add_option("--csv", ev.csv, "Per-label SRL scores (CSV)");

    PredictArgs pr;
    auto* c_pred = app.add_subcommand("predict", "Predict trees or frames");
    c_pred->add_option("--checkpoint", pr.checkpoint)->required();
    c_pred->add_option("--data", pr.data)->required();
    c_pred->add_option("--task", pr.task, "dp or srl");
    c_pred->add_option("--root-from", pr.root_from);
    c_pred->add_option("--setting", pr.setting, "Expected SRL setting");
    c_pred->add_option("--out", pr.out)->required();

    AblationArgs abl;
    auto* c_abl = app.add_subcommand("ablation-report", "Compare evaluation reports against a baseline");
    c_abl->add_option("--run", abl.runs, "Eval reports; the first is the baseline")->required();
    c_abl->add_option("--metrics", abl.metrics, "Metric keys");
    c_abl->add_option("--out", abl.out, "Table output");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << trainer::kToolkitVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage", e.what(), kConfigError);
    }

    try {
        if (c_gen->parsed()) return cmd_gen_synth(gen, out);
        if (c_split->parsed()) return cmd_split(split, out);
        if (c_bpe->parsed()) return cmd_learn_bpe(bpe, out);
        if (c_train->parsed()) return run_training(tr, trainer::parse_task(tr.task), "train", out);
        if (c_multi->parsed()) return run_training(multi, Task::kMulti, "train-multi", out);
        if (c_hpo->parsed()) return cmd_hpo(hpo, out);
        if (c_eval->parsed()) return cmd_eval(ev, out);
        if (c_pred->parsed()) return cmd_predict(pr, out);
        if (c_abl->parsed()) return cmd_ablation(abl, out);
    } catch (const ConfigError& e) {
        return fail(err, "config", e.what(), kConfigError);
    } catch (const DataError& e) {
        return fail(err, "data", e.what(), kDataError);
    } catch (const NumericError& e) {
        return fail(err, "numeric", e.what(), kNumericError);
    } catch (const ShapeError& e) {
        return fail(err, "config", e.what(), kConfigError);
    } catch (const std::exception& e) {
        return fail(err, "internal", e.what(), kFailure);
    }
    return fail(err, "usage", "no command given", kConfigError);
}

}  // namespace mtparse::cli
