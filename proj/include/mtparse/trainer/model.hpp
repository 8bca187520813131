#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/dp/dp_head.hpp"
#include "mtparse/dp/metrics.hpp"
#include "mtparse/encoder/encoder.hpp"
#include "mtparse/srl/metrics.hpp"
#include "mtparse/srl/srl_head.hpp"
#include "mtparse/tokenize/subword.hpp"
#include "mtparse/trainer/config.hpp"
#include "mtparse/trainer/manifest.hpp"

namespace mtparse::trainer {

using numerics::Parameter;
using numerics::Rng;

/// Independent random streams derived from one run seed.
enum Stream : std::uint64_t {
    kInitEncoder = 1,
    kInitDp = 2,
    kInitSrl = 3,
    kDropout = 4,
    kTaskDraw = 5,
    kDpShuffle = 6,
    kSrlShuffle = 7,
    kSearch = 8,
};

/// Shared encoder plus whichever heads have a label inventory.
class Model {
  public:
    /// A DP head is built when config.dep_labels is non-empty, an SRL head
    /// when config.roles is non-empty.
    Model(const ModelConfig& config, tokenize::SubwordModel tokenizer, std::uint64_t seed);

    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    const ModelConfig& config() const noexcept { return config_; }
    const tokenize::SubwordModel& tokenizer() const noexcept { return tokenizer_; }
    std::uint64_t seed() const noexcept { return seed_; }
    bool has_dp() const noexcept { return dp_.has_value(); }
    bool has_srl() const noexcept { return srl_.has_value(); }

    encoder::Encoder& encoder() { return encoder_; }
    dp::DpHead& dp();
    srl::SrlHead& srl();

    std::vector<Parameter*> encoder_parameters() { return encoder_.parameters(); }
    std::vector<Parameter*> dp_parameters();
    std::vector<Parameter*> srl_parameters();
    std::vector<Parameter*> all_parameters();

    /// Tagset index of every SRL label, in the configured setting.
    const std::vector<std::string>& srl_tagset() const { return srl_tagset_; }

  private:
    ModelConfig config_;
    tokenize::SubwordModel tokenizer_;
    std::uint64_t seed_;
    encoder::Encoder encoder_;
    std::optional<dp::DpHead> dp_;
    std::optional<srl::SrlHead> srl_;
    std::vector<std::string> srl_tagset_;
};

/// Sorted label inventories found in a corpus.
std::vector<std::string> collect_dep_labels(const std::vector<corpus::Sentence>& data);
std::vector<std::string> collect_roles(const std::vector<corpus::Sentence>& data);

struct DpInstance {
    std::size_t sentence = 0;
    tokenize::AssembledInput input;
    std::vector<int> head_units;
    std::vector<int> labels;
};

struct SrlInstance {
    std::size_t sentence = 0;
    std::size_t frame = 0;
    tokenize::AssembledInput input;
    std::vector<int> gold;
};

/// Token budget handling: training skips oversize sentences (counted in
/// `skipped`), evaluation treats them as errors.
struct InstanceOptions {
    int max_tokens = tokenize::kDefaultMaxTokens;
    bool skip_oversize = false;
    /// root_known mode: root token per sentence; gold roots when absent.
    const std::vector<int>* roots = nullptr;
};

std::vector<DpInstance> make_dp_instances(Model& model, const std::vector<corpus::Sentence>& data,
                                          const InstanceOptions& options, long* skipped = nullptr);
std::vector<SrlInstance> make_srl_instances(Model& model, const std::vector<corpus::Sentence>& data,
                                            const InstanceOptions& options, long* skipped = nullptr);

/// Unit vectors for a DP instance (SUW units then [ROOT]).
numerics::Var dp_units(numerics::Tape& tape, Model& model, const tokenize::AssembledInput& input, bool train,
                       Rng& dropout_rng);

std::vector<dp::DpPrediction> predict_dp(Model& model, const std::vector<corpus::Sentence>& data,
                                         const std::vector<int>* roots = nullptr);
/// Root token per sentence: the SUW most likely to attach to [ROOT].
std::vector<int> predict_roots(Model& model, const std::vector<corpus::Sentence>& data);
/// One entry per frame that has targets in the model's setting.
std::vector<srl::FrameArguments> predict_srl(Model& model, const std::vector<corpus::Sentence>& data);
std::vector<srl::FrameArguments> gold_frames(const std::vector<corpus::Sentence>& data, tokenize::SrlSetting setting);

dp::DpMetrics evaluate_dp_model(Model& model, const std::vector<corpus::Sentence>& data,
                                const std::vector<int>* roots = nullptr);
srl::SrlReport evaluate_srl_model(Model& model, const std::vector<corpus::Sentence>& data);

/// Writes the manifest (completed with the model config, tokenizer, seed and
/// a parameter hash, then sealed) and the parameters. Returns the manifest hash.
std::string save_model(const std::filesystem::path& path, Model& model, nlohmann::json manifest);
struct LoadedModel {
    std::unique_ptr<Model> model;
    nlohmann::json manifest;
};
/// Rebuilds the model from the manifest and fills its parameters. Throws
/// ConfigError when a stored tensor is missing or has the wrong shape, or
/// when `expected` is given and disagrees with the stored dimensions.
LoadedModel load_model(const std::filesystem::path& path, const ModelConfig* expected = nullptr);

/// Field names whose values differ between two model configs' dimensions.
std::vector<std::string> dimension_mismatches(const ModelConfig& a, const ModelConfig& b);

nlohmann::json to_json(const dp::DpMetrics& m);
nlohmann::json to_json(const srl::SrlReport& r);

}  // namespace mtparse::trainer
