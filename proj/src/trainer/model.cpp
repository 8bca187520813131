#include "mtparse/trainer/model.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include "mtparse/error.hpp"
#include "mtparse/numerics/checkpoint.hpp"
#include "mtparse/srl/bio.hpp"

namespace mtparse::trainer {

using nlohmann::json;
using tokenize::SrlSetting;

namespace {

encoder::EncoderConfig encoder_config(const ModelConfig& c, const tokenize::SubwordModel& tok) {
    encoder::EncoderConfig e;
    e.vocab_size = tok.vocab_size();
    e.embed_dim = c.embed_dim;
    e.hidden = c.hidden;
    e.layers = c.layers;
    e.dropout = c.dropout_bert;
    e.max_tokens = c.max_tokens;
    return e;
}

encoder::Encoder build_encoder(const ModelConfig& c, const tokenize::SubwordModel& tok, std::uint64_t seed) {
    c.validate();
    Rng rng = numerics::derive_rng(seed, kInitEncoder);
    return encoder::Encoder(encoder_config(c, tok), rng);
}

}  // namespace

Model::Model(const ModelConfig& config, tokenize::SubwordModel tokenizer, std::uint64_t seed)
    : config_(config), tokenizer_(std::move(tokenizer)), seed_(seed), encoder_(build_encoder(config_, tokenizer_, seed)) {
    if (!config_.dep_labels.empty()) {
        Rng rng = numerics::derive_rng(seed, kInitDp);
        dp::DpHeadConfig c;
        c.input_dim = config_.hidden;
        c.score_dim = config_.dp_score_dim;
        c.labels = config_.dep_labels;
        c.dropout = config_.dropout_dp;
        dp_.emplace(c, rng);
    }
    if (!config_.roles.empty()) {
        srl_tagset_ = config_.srl_setting == SrlSetting::kMorpheme ? srl::morpheme_tagset(config_.roles) : config_.roles;
        Rng rng = numerics::derive_rng(seed, kInitSrl);
        srl::SrlHeadConfig c;
        c.input_dim = config_.hidden;
        c.mlp_hidden = config_.srl_mlp_hidden;
        c.tagset = srl_tagset_;
        c.dropout = config_.dropout_lstm;
        c.use_bilstm = config_.use_bilstm;
        srl_.emplace(c, rng);
    }
}

dp::DpHead& Model::dp() {
    if (!dp_) throw ConfigError("model has no dependency head (no dependency labels)");
    return *dp_;
}

srl::SrlHead& Model::srl() {
    if (!srl_) throw ConfigError("model has no SRL head (no roles)");
    return *srl_;
}

std::vector<Parameter*> Model::dp_parameters() { return dp_ ? dp_->parameters() : std::vector<Parameter*>{}; }
std::vector<Parameter*> Model::srl_parameters() { return srl_ ? srl_->parameters() : std::vector<Parameter*>{}; }

std::vector<Parameter*> Model::all_parameters() {
    auto out = encoder_parameters();
    for (Parameter* p : dp_parameters()) out.push_back(p);
    for (Parameter* p : srl_parameters()) out.push_back(p);
    return out;
}

std::vector<std::string> collect_dep_labels(const std::vector<corpus::Sentence>& data) {
    std::set<std::string> labels;
    for (const auto& s : data) {
        if (s.dep_labels) labels.insert(s.dep_labels->begin(), s.dep_labels->end());
    }
    return {labels.begin(), labels.end()};
}

std::vector<std::string> collect_roles(const std::vector<corpus::Sentence>& data) {
    std::set<std::string> roles;
    for (const auto& s : data) {
        if (!s.frames) continue;
        for (const auto& f : *s.frames) {
            for (const auto& a : f.arguments) roles.insert(a.label);
        }
    }
    return {roles.begin(), roles.end()};
}

std::vector<DpInstance> make_dp_instances(Model& model, const std::vector<corpus::Sentence>& data,
                                          const InstanceOptions& options, long* skipped) {
    auto& head = model.dp();
    const auto mode = model.config().dp_mode;
    if (options.roots && options.roots->size() != data.size()) {
        throw DataError("root predictions cover " + std::to_string(options.roots->size()) + " of " +
                        std::to_string(data.size()) + " sentences");
    }
    std::vector<DpInstance> out;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& s = data[k];
        if (!s.heads || !s.dep_labels) throw DataError("sentence " + s.id + " has no gold tree");
        std::optional<int> root;
        if (mode == tokenize::DpMode::kRootKnown) root = options.roots ? (*options.roots)[k] : corpus::root_token(s);
        DpInstance inst;
        inst.sentence = k;
        try {
            inst.input = tokenize::assemble_dp(s, mode, root, model.tokenizer(), options.max_tokens);
        } catch (const LengthError& e) {
            if (!options.skip_oversize) throw;
            if (skipped) ++*skipped;
            std::cerr << "warning: skipping " << e.what() << '\n';
            continue;
        }
        const int n = s.size();
        for (int i = 0; i < n; ++i) {
            inst.head_units.push_back(dp::head_to_unit((*s.heads)[i], n));
            const int l = head.label_index((*s.dep_labels)[i]);
            if (l < 0) throw DataError("sentence " + s.id + ": dependency label '" + (*s.dep_labels)[i] + "' not in the model inventory");
            inst.labels.push_back(l);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

namespace {

bool frame_has_targets(const corpus::PredicateFrame& f, SrlSetting setting) {
    return setting == SrlSetting::kMorpheme || !f.arguments.empty();
}

}  // namespace

std::vector<SrlInstance> make_srl_instances(Model& model, const std::vector<corpus::Sentence>& data,
                                            const InstanceOptions& options, long* skipped) {
    auto& head = model.srl();
    const auto setting = model.config().srl_setting;
    std::vector<SrlInstance> out;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& s = data[k];
        if (!s.frames) continue;
        for (std::size_t f = 0; f < s.frames->size(); ++f) {
            const auto& frame = (*s.frames)[f];
            if (!frame_has_targets(frame, setting)) continue;
            SrlInstance inst;
            inst.sentence = k;
            inst.frame = f;
            try {
                inst.input = tokenize::assemble_srl(s, frame, setting, model.tokenizer(), options.max_tokens,
                                                    model.config().srl_predicate_segment);
            } catch (const LengthError& e) {
                if (!options.skip_oversize) throw;
                if (skipped) ++*skipped;
                std::cerr << "warning: skipping " << e.what() << '\n';
                continue;
            }
            std::vector<std::string> tags;
            if (setting == SrlSetting::kMorpheme) {
                tags = srl::encode_spans_as_tags(frame.arguments, s.luw_count());
            } else {
                for (const auto& a : frame.arguments) tags.push_back(a.label);
            }
            for (const auto& t : tags) {
                const int idx = head.tag_index(t);
                if (idx < 0) throw DataError("sentence " + s.id + ": tag '" + t + "' not in the model inventory");
                inst.gold.push_back(idx);
            }
            out.push_back(std::move(inst));
        }
    }
    return out;
}

numerics::Var dp_units(numerics::Tape& tape, Model& model, const tokenize::AssembledInput& input, bool train,
                       Rng& dropout_rng) {
    return tokenize::average_units(model.encoder().encode(tape, input, train, dropout_rng), input.unit_map);
}

std::vector<dp::DpPrediction> predict_dp(Model& model, const std::vector<corpus::Sentence>& data,
                                         const std::vector<int>* roots) {
    auto& head = model.dp();
    const auto mode = model.config().dp_mode;
    std::vector<dp::DpPrediction> out;
    out.reserve(data.size());
    Rng unused(0);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& s = data[k];
        std::optional<int> root;
        if (mode == tokenize::DpMode::kRootKnown) {
            if (roots) {
                root = (*roots).at(k);
            } else if (s.heads) {
                root = corpus::root_token(s);
            } else {
                throw ConfigError("root_known model needs root predictions for sentence " + s.id);
            }
        }
        auto input = tokenize::assemble_dp(s, mode, root, model.tokenizer(), model.config().max_tokens);
        numerics::Tape tape;
        out.push_back(head.decode(dp_units(tape, model, input, false, unused)));
    }
    return out;
}

std::vector<int> predict_roots(Model& model, const std::vector<corpus::Sentence>& data) {
    auto& head = model.dp();
    if (model.config().dp_mode != tokenize::DpMode::kRootUnknown) {
        throw ConfigError("root prediction needs a root_unknown dependency model");
    }
    std::vector<int> out;
    Rng unused(0);
    for (const auto& s : data) {
        auto input = tokenize::assemble_dp(s, tokenize::DpMode::kRootUnknown, std::nullopt, model.tokenizer(),
                                           model.config().max_tokens);
        numerics::Tape tape;
        const auto p = head.root_probabilities(dp_units(tape, model, input, false, unused));
        out.push_back(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
    }
    return out;
}

std::vector<srl::FrameArguments> gold_frames(const std::vector<corpus::Sentence>& data, SrlSetting setting) {
    std::vector<srl::FrameArguments> out;
    for (const auto& s : data) {
        if (!s.frames) continue;
        for (const auto& f : *s.frames) {
            if (frame_has_targets(f, setting)) out.push_back({s.id, f.predicate, f.arguments});
        }
    }
    return out;
}

std::vector<srl::FrameArguments> predict_srl(Model& model, const std::vector<corpus::Sentence>& data) {
    auto& head = model.srl();
    const auto setting = model.config().srl_setting;
    std::vector<srl::FrameArguments> out;
    Rng unused(0);
    for (const auto& s : data) {
        if (!s.frames) continue;
        for (const auto& f : *s.frames) {
            if (!frame_has_targets(f, setting)) continue;
            auto input = tokenize::assemble_srl(s, f, setting, model.tokenizer(), model.config().max_tokens,
                                                model.config().srl_predicate_segment);
            numerics::Tape tape;
            numerics::Var hidden = model.encoder().encode(tape, input, false, unused);
            const auto tags = head.predict(hidden, input);
            srl::FrameArguments pred{s.id, f.predicate, {}};
            if (setting == SrlSetting::kMorpheme) {
                std::vector<std::string> names;
                for (int t : tags) names.push_back(model.srl_tagset()[t]);
                pred.arguments = srl::bio_decode(names);
            } else {
                for (std::size_t a = 0; a < f.arguments.size(); ++a) {
                    pred.arguments.push_back(corpus::Argument{model.srl_tagset()[tags[a]], f.arguments[a].span});
                }
            }
            out.push_back(std::move(pred));
        }
    }
    return out;
}

dp::DpMetrics evaluate_dp_model(Model& model, const std::vector<corpus::Sentence>& data, const std::vector<int>* roots) {
    const auto pred = predict_dp(model, data, roots);
    return dp::evaluate_dp(pred, data);
}

srl::SrlReport evaluate_srl_model(Model& model, const std::vector<corpus::Sentence>& data) {
    const auto setting = model.config().srl_setting;
    const auto pred = predict_srl(model, data);
    const auto gold = gold_frames(data, setting);
    return srl::evaluate_srl(pred, gold, setting);
}

std::string save_model(const std::filesystem::path& path, Model& model, json manifest) {
    manifest["model"] = to_json(model.config());
    manifest["tokenizer"] = model.tokenizer().serialize();
    manifest["seed"] = model.seed();
    manifest["toolkit_version"] = kToolkitVersion;
    const auto params = model.all_parameters();
    std::vector<const Parameter*> cparams(params.begin(), params.end());
    std::ostringstream payload;
    numerics::write_checkpoint(payload, "", cparams);
    manifest["params_sha1"] = git_blob_hash(payload.str());
    seal_manifest(manifest);
    numerics::write_checkpoint(path, manifest.dump(2), cparams);
    return manifest["manifest_hash"].get<std::string>();
}

std::vector<std::string> dimension_mismatches(const ModelConfig& a, const ModelConfig& b) {
    std::vector<std::string> out;
    auto cmp = [&out](bool same, const char* name) {
        if (!same) out.emplace_back(name);
    };
    cmp(a.embed_dim == b.embed_dim, "embed_dim");
    cmp(a.hidden == b.hidden, "hidden");
    cmp(a.layers == b.layers, "layers");
    cmp(a.max_tokens == b.max_tokens, "max_tokens");
    cmp(a.dp_score_dim == b.dp_score_dim, "dp_score_dim");
    cmp(a.srl_mlp_hidden == b.srl_mlp_hidden, "srl_mlp_hidden");
    cmp(a.use_bilstm == b.use_bilstm, "use_bilstm");
    cmp(a.srl_predicate_segment == b.srl_predicate_segment, "srl_predicate_segment");
    cmp(a.dp_mode == b.dp_mode, "dp_mode");
    cmp(a.srl_setting == b.srl_setting, "srl_setting");
    cmp(a.dep_labels == b.dep_labels, "dep_labels");
    cmp(a.roles == b.roles, "roles");
    return out;
}

LoadedModel load_model(const std::filesystem::path& path, const ModelConfig* expected) {
    auto ck = numerics::read_checkpoint(path);
    LoadedModel out;
    try {
        out.manifest = json::parse(ck.manifest);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": unreadable manifest: " + e.what());
    }
    for (const char* key : {"model", "tokenizer", "seed"}) {
        if (!out.manifest.contains(key)) throw ConfigError(path.string() + ": manifest lacks '" + key + "'");
    }
    const ModelConfig config = model_config_from_json(out.manifest["model"]);
    if (expected) {
        const auto diff = dimension_mismatches(*expected, config);
        if (!diff.empty()) {
            std::string msg = path.string() + ": manifest mismatch in";
            for (const auto& d : diff) msg += " " + d;
            throw ConfigError(msg);
        }
    }
    auto tok = tokenize::SubwordModel::deserialize(out.manifest["tokenizer"].get<std::string>());
    out.model = std::make_unique<Model>(config, std::move(tok), out.manifest["seed"].get<std::uint64_t>());
    const auto params = out.model->all_parameters();
    if (ck.tensors.size() != params.size()) {
        throw ConfigError(path.string() + ": manifest mismatch: " + std::to_string(ck.tensors.size()) +
                          " stored tensors, model has " + std::to_string(params.size()));
    }
    for (Parameter* p : params) {
        auto it = ck.tensors.find(p->name);
        if (it == ck.tensors.end()) throw ConfigError(path.string() + ": manifest mismatch: missing tensor " + p->name);
        if (it->second.shape() != p->value.shape()) {
            throw ConfigError(path.string() + ": manifest mismatch: tensor " + p->name + " has shape " +
                              it->second.shape_string() + ", expected " + p->value.shape_string());
        }
        p->value = it->second;
    }
    return out;
}

json to_json(const dp::DpMetrics& m) {
    return {{"uas", m.uas}, {"las", m.las}, {"root", m.root}, {"tokens", m.tokens}, {"sentences", m.sentences},
            {"cycles", m.cycles}};
}

json to_json(const srl::SrlReport& r) {
    json labels = json::object();
    for (const auto& [name, s] : r.per_label) {
        labels[name] = {{"gold", s.gold},           {"predicted", s.predicted}, {"correct", s.correct},
                        {"precision", s.precision}, {"recall", s.recall},       {"f1", s.f1}};
    }
    return {{"setting", tokenize::to_string(r.setting)},
            {"gold", r.gold},
            {"predicted", r.predicted},
            {"correct", r.correct},
            {"identified", r.identified},
            {"micro_precision", r.micro_precision},
            {"micro_recall", r.micro_recall},
            {"micro_f1", r.micro_f1},
            {"macro_precision", r.macro_precision},
            {"macro_recall", r.macro_recall},
            {"macro_f1", r.macro_f1},
            {"identification_precision", r.identification_precision},
            {"identification_recall", r.identification_recall},
            {"identification_f1", r.identification_f1},
            {"accuracy", r.accuracy},
            {"per_label", labels}};
}

}  // namespace mtparse::trainer
