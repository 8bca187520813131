#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "mtparse/corpus/synthetic.hpp"
#include "mtparse/error.hpp"
#include "mtparse/trainer/hpo.hpp"
#include "mtparse/trainer/manifest.hpp"
#include "mtparse/trainer/model.hpp"
#include "mtparse/trainer/train.hpp"

using namespace mtparse;
using namespace mtparse::trainer;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    std::vector<corpus::Sentence> data;
    tokenize::SubwordModel tokenizer;
    ModelConfig model;
    TrainConfig train;

    explicit Fixture(int n = 10) {
        corpus::SynthConfig sc;
        sc.n_sentences = n;
        data = corpus::generate_synthetic(sc, 11);
        tokenizer = tokenize::learn_atomic_vocabulary(data);
        model.embed_dim = 8;
        model.hidden = 8;
        model.layers = 1;
        model.dep_labels = collect_dep_labels(data);
        model.roles = collect_roles(data);
        train.batch_size = 4;
        train.epochs = 2;
        train.learning_rate = 5e-3;
        train.seed = 3;
    }

    TrainData both() const { return {&data, &data, &data, &data}; }
};

std::vector<numerics::Tensor> values(const std::vector<numerics::Parameter*>& ps) {
    std::vector<numerics::Tensor> out;
    for (auto* p : ps) out.push_back(p->value);
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mtparse_trainer_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Config, JsonRoundTripAndStrictKeys) {
    RunConfig c = default_run_config();
    c.train.learning_rate = 0.02;
    c.model.use_bilstm = false;
    const RunConfig back = run_config_from_json(to_json(c));
    EXPECT_EQ(back.model, c.model);
    EXPECT_EQ(back.train, c.train);
    EXPECT_EQ(back.hpo.space.dims, c.hpo.space.dims);

    EXPECT_THROW(run_config_from_json(json{{"train", {{"learning_rat", 0.1}}}}), ConfigError);
    EXPECT_THROW(run_config_from_json(json{{"train", {{"epochs", "ten"}}}}), ConfigError);
    EXPECT_THROW(run_config_from_json(json{{"model", {{"hidden", 7}}}}), ConfigError);
    EXPECT_THROW(run_config_from_json(json{{"train", {{"beta_srl", 1.5}}}}), ConfigError);
}

TEST(Config, NamedHyperparameters) {
    RunConfig c = default_run_config();
    apply_hyperparameter(c, "dropout_lstm", 0.25);
    apply_hyperparameter(c, "lambda_dp", 3.0);
    EXPECT_EQ(c.model.dropout_lstm, 0.25);
    EXPECT_EQ(get_hyperparameter(c, "lambda_dp"), 3.0);
    EXPECT_THROW(apply_hyperparameter(c, "momentum", 0.9), ConfigError);
}

TEST(Search, SamplesStayInsideBounds) {
    SearchSpace space{{{"learning_rate", true, 1e-4, 1e-2}, {"beta_srl", false, 0.1, 0.9}}};
    Rng rng(5);
    bool low_half = false, high_half = false;
    for (int k = 0; k < 500; ++k) {
        const auto p = sample_point(space, rng);
        EXPECT_GE(p.at("learning_rate"), 1e-4);
        EXPECT_LE(p.at("learning_rate"), 1e-2);
        EXPECT_GE(p.at("beta_srl"), 0.1);
        EXPECT_LE(p.at("beta_srl"), 0.9);
        // log scale: about half the draws fall below the geometric midpoint 1e-3
        (p.at("learning_rate") < 1e-3 ? low_half : high_half) = true;
    }
    EXPECT_TRUE(low_half && high_half);
}

TEST(Search, RelevantDimensionsPerTask) {
    const auto space = default_run_config().hpo.space;
    auto names = [](const SearchSpace& s) {
        std::vector<std::string> out;
        for (const auto& d : s.dims) out.push_back(d.name);
        return out;
    };
    EXPECT_EQ(names(relevant_dims(space, Task::kDp)),
              (std::vector<std::string>{"learning_rate", "dropout_bert", "dropout_dp", "lambda_dp"}));
    EXPECT_EQ(names(relevant_dims(space, Task::kSrl)),
              (std::vector<std::string>{"learning_rate", "dropout_bert", "dropout_lstm"}));
    EXPECT_EQ(relevant_dims(space, Task::kMulti).dims.size(), 6u);
    EXPECT_EQ(trial_epochs(HpoConfig{}, Task::kDp), 3);
    EXPECT_EQ(trial_epochs(HpoConfig{}, Task::kMulti), 10);
}

TEST(Train, ZeroEpochsKeepsInitialization) {
    Fixture f;
    Model m(f.model, f.tokenizer, 1);
    const auto before = values(m.all_parameters());
    f.train.epochs = 0;
    const auto r = train_multitask(m, f.train, f.both());
    EXPECT_TRUE(r.history.empty());
    EXPECT_EQ(r.best_epoch, 0);
    EXPECT_EQ(values(m.all_parameters()), before);
}

TEST(Train, SameSeedSameRun) {
    Fixture f;
    Model a(f.model, f.tokenizer, 1), b(f.model, f.tokenizer, 1);
    f.train.beta_srl = 0.5;
    const auto ra = train_multitask(a, f.train, f.both());
    const auto rb = train_multitask(b, f.train, f.both());
    EXPECT_EQ(ra.history, rb.history);
    EXPECT_EQ(values(a.all_parameters()), values(b.all_parameters()));
    EXPECT_GT(ra.history[0].dp_steps + ra.history[0].srl_steps, 0);
}

TEST(Train, LossDecreasesOnTinyCorpus) {
    Fixture f;
    f.model.dropout_bert = f.model.dropout_dp = f.model.dropout_lstm = 0.0;
    f.train.weight_decay = 0.0;
    f.train.epochs = 15;
    Model m(f.model, f.tokenizer, 1);
    const auto r = train_single(m, f.train, Task::kDp, f.both());
    EXPECT_LT(r.history.back().dp_loss, r.history.front().dp_loss);
    EXPECT_GT(r.best_metric, r.history.front().target - 1e-12);
}

TEST(Train, BetaOneMatchesSingleTaskSrl) {
    Fixture f;
    f.train.beta_srl = 1.0;
    Model multi(f.model, f.tokenizer, 1), single(f.model, f.tokenizer, 1);
    const auto rm = train_multitask(multi, f.train, f.both());
    const auto rs = train_single(single, f.train, Task::kSrl, f.both());
    ASSERT_EQ(rm.history.size(), rs.history.size());
    for (std::size_t e = 0; e < rm.history.size(); ++e) {
        EXPECT_EQ(rm.history[e].dp_steps, 0);
        EXPECT_EQ(rm.history[e].srl_steps, rs.history[e].srl_steps);
        EXPECT_EQ(rm.history[e].srl_loss, rs.history[e].srl_loss);
        EXPECT_EQ(rm.history[e].target, rs.history[e].target);
        ASSERT_TRUE(rm.history[e].srl && rs.history[e].srl);
        EXPECT_EQ(rm.history[e].srl->micro_f1, rs.history[e].srl->micro_f1);
        EXPECT_EQ(rm.history[e].srl->correct, rs.history[e].srl->correct);
    }
    EXPECT_EQ(values(multi.encoder_parameters()), values(single.encoder_parameters()));
    EXPECT_EQ(values(multi.srl_parameters()), values(single.srl_parameters()));
}

TEST(Train, ZeroLambdaLeavesDpHeadUntouched) {
    Fixture f;
    f.train.lambda_dp = 0.0;
    f.train.weight_decay = 0.0;
    f.train.beta_srl = 0.5;
    Model m(f.model, f.tokenizer, 1);
    const auto dp_before = values(m.dp_parameters());
    const auto enc_before = values(m.encoder_parameters());
    const auto r = train_multitask(m, f.train, f.both());
    long dp_steps = 0;
    for (const auto& e : r.history) dp_steps += e.dp_steps;
    ASSERT_GT(dp_steps, 0);
    EXPECT_EQ(values(m.dp_parameters()), dp_before);
    EXPECT_NE(values(m.encoder_parameters()), enc_before);
}

TEST(Train, DrawObserverSeesEveryStep) {
    Fixture f;
    f.train.beta_srl = 0.72;
    Model m(f.model, f.tokenizer, 1);
    long srl = 0, total = 0;
    TrainOptions opt;
    opt.on_draw = [&](bool s) {
        srl += s;
        ++total;
    };
    const auto r = train_multitask(m, f.train, f.both(), opt);
    EXPECT_EQ(total, r.steps);
    long srl_steps = 0;
    for (const auto& e : r.history) srl_steps += e.srl_steps;
    EXPECT_EQ(srl, srl_steps);
}

TEST(Train, MissingDevCorpusIsConfigError) {
    Fixture f;
    Model m(f.model, f.tokenizer, 1);
    TrainData d{&f.data, nullptr, nullptr, nullptr};
    EXPECT_THROW(train_single(m, f.train, Task::kDp, d), ConfigError);
}

TEST(Manifest, KnownHashes) {
    EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    EXPECT_EQ(sha1_hex("abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
    json a{{"x", 1}, {"created", "now"}};
    json b{{"x", 1}, {"created", "later"}};
    EXPECT_EQ(manifest_hash(a), manifest_hash(b));
    b["x"] = 2;
    EXPECT_NE(manifest_hash(a), manifest_hash(b));
    seal_manifest(a);
    EXPECT_EQ(a["manifest_hash"], manifest_hash(a));
}

TEST(Checkpoint, SaveLoadRoundTripAndMismatch) {
    Fixture f;
    Model m(f.model, f.tokenizer, 9);
    const fs::path path = scratch("model.ckpt");
    const std::string hash = save_model(path, m, json{{"task", "multi"}});
    auto loaded = load_model(path);
    EXPECT_EQ(loaded.manifest["manifest_hash"], hash);
    EXPECT_EQ(loaded.manifest["task"], "multi");
    EXPECT_EQ(values(loaded.model->all_parameters()), values(m.all_parameters()));
    EXPECT_EQ(evaluate_dp_model(*loaded.model, f.data).uas, evaluate_dp_model(m, f.data).uas);

    ModelConfig other = f.model;
    other.hidden = 10;
    EXPECT_THROW(load_model(path, &other), ConfigError);
    EXPECT_EQ(dimension_mismatches(f.model, other), (std::vector<std::string>{"hidden"}));
    fs::remove_all(path.parent_path());
}

TEST(Evaluate, UntrainedTaggerIsWeak) {
    Fixture f(30);
    Model m(f.model, f.tokenizer, 2);
    EXPECT_LT(evaluate_srl_model(m, f.data).micro_f1, 0.2);
}

TEST(Evaluate, PredictedRootsAreInRange) {
    Fixture f;
    Model m(f.model, f.tokenizer, 2);
    const auto roots = predict_roots(m, f.data);
    ASSERT_EQ(roots.size(), f.data.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        EXPECT_GE(roots[i], 0);
        EXPECT_LT(roots[i], f.data[i].size());
    }
}

namespace {

RunConfig hpo_base(const Fixture& f, int trials) {
    RunConfig c = default_run_config();
    c.model = f.model;
    c.train = f.train;
    c.hpo.n_trials = trials;
    c.hpo.epochs = 2;
    return c;
}

}  // namespace

TEST(Hpo, SingleTrialCompletes) {
    Fixture f;
    const auto r = hpo_search(hpo_base(f, 1), Task::kDp, f.tokenizer, f.both());
    ASSERT_EQ(r.trials.size(), 1u);
    EXPECT_FALSE(r.trials[0].pruned);
    EXPECT_EQ(r.trials[0].metrics.size(), 2u);
    EXPECT_EQ(r.best_trial, 0);
    EXPECT_EQ(r.best_config.train.learning_rate, r.trials[0].sampled.at("learning_rate"));
}

TEST(Hpo, DegenerateSpaceGivesIdenticalTrials) {
    Fixture f;
    RunConfig c = hpo_base(f, 3);
    c.hpo.space.dims = {{"learning_rate", false, 4e-3, 4e-3}};
    const auto r = hpo_search(c, Task::kDp, f.tokenizer, f.both());
    for (const auto& t : r.trials) {
        EXPECT_EQ(t.metrics, r.trials[0].metrics);
        EXPECT_FALSE(t.pruned);  // equal to the median is not below it
    }
    EXPECT_EQ(r.best_trial, 0);
}

TEST(Hpo, LogIsReproducible) {
    Fixture f;
    const RunConfig c = hpo_base(f, 3);
    std::ostringstream a, b;
    HpoOptions oa, ob;
    oa.log = &a;
    ob.log = &b;
    hpo_search(c, Task::kMulti, f.tokenizer, f.both(), oa);
    hpo_search(c, Task::kMulti, f.tokenizer, f.both(), ob);
    EXPECT_EQ(a.str(), b.str());
    std::istringstream lines(a.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        const json j = json::parse(line);
        EXPECT_EQ(j["trial"], n++);
        EXPECT_TRUE(j.contains("config") && j.contains("metrics") && j.contains("pruned"));
    }
    EXPECT_EQ(n, 3);
}
