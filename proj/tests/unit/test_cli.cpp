#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "mtparse/cli/app.hpp"
#include "mtparse/corpus/io.hpp"

using namespace mtparse;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
  protected:
    static inline fs::path dir;

    static std::string at(const std::string& name) { return (dir / name).string(); }

    static void SetUpTestSuite() {
        dir = fs::temp_directory_path() / ("mtparse_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        ASSERT_EQ(run({"gen-synth", "--out", at("syn.jsonl"), "--conllu", at("syn.conllu"), "--n", "40", "--seed", "7"})
                      .code,
                  0);
        ASSERT_EQ(run({"split", "--dp", at("syn.conllu"), "--srl", at("syn.jsonl"), "--dp-out", at("dp"), "--srl-out",
                       at("srl"), "--seed", "1"})
                      .code,
                  0);
        std::ofstream(at("tiny.json"))
            << R"({"model":{"embed_dim":8,"hidden":8,"layers":1},"train":{"epochs":2,"batch_size":8}})";
    }

    static void TearDownTestSuite() { fs::remove_all(dir); }
};

}  // namespace

TEST_F(Cli, SplitKeepsFormatAndWritesSidecars) {
    for (const char* f : {"dp.train.conllu", "dp.dev.conllu", "dp.test.conllu", "srl.train.jsonl", "srl.dev.jsonl",
                          "srl.test.jsonl", "dp.manifest.json", "srl.manifest.json", "syn.jsonl.manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const json m = json::parse(slurp(dir / "srl.manifest.json"));
    EXPECT_EQ(m["command"], "split");
    std::ifstream in(dir / "srl.train.jsonl");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(json::parse(first)["manifest_hash"], m["manifest_hash"]);
    EXPECT_EQ(corpus::read_any(dir / "dp.train.conllu").size(), 32u);
}

TEST_F(Cli, ExitCodes) {
    const auto usage = run({"bogus"});
    EXPECT_EQ(usage.code, cli::kConfigError);
    EXPECT_EQ(json::parse(usage.err)["exit_code"], 2);

    EXPECT_EQ(run({"train", "--task", "dp", "--train", at("dp.train.conllu"), "--dev", at("dp.dev.conllu"), "--config",
                   at("missing.json"), "--out", at("x.ckpt")})
                  .code,
              cli::kConfigError);

    const auto missing = run({"train", "--task", "dp", "--train", at("nothing.conllu"), "--dev", at("dp.dev.conllu"),
                              "--config", at("tiny.json"), "--out", at("x.ckpt")});
    EXPECT_EQ(missing.code, cli::kDataError);
    EXPECT_EQ(json::parse(missing.err)["error"], "data");

    std::ofstream(at("broken.jsonl")) << "{\"sentence_id\": \n";
    EXPECT_EQ(run({"eval", "--predictions", at("broken.jsonl"), "--gold", at("srl.test.jsonl"), "--task", "srl"}).code,
              cli::kDataError);

    std::ofstream(at("diverge.json"))
        << R"({"model":{"embed_dim":8,"hidden":8,"layers":1},"train":{"epochs":1,"batch_size":8,"learning_rate":1e300}})";
    const auto numeric = run({"train", "--task", "dp", "--train", at("dp.train.conllu"), "--dev", at("dp.dev.conllu"),
                              "--config", at("diverge.json"), "--out", at("x.ckpt")});
    EXPECT_EQ(numeric.code, cli::kNumericError) << numeric.err;
}

TEST_F(Cli, EvalOfGoldAgainstItselfIsPerfect) {
    const auto srl = run({"eval", "--predictions", at("srl.test.jsonl"), "--gold", at("srl.test.jsonl"), "--task",
                          "srl", "--out", at("gold_srl.json")});
    ASSERT_EQ(srl.code, 0) << srl.err;
    const json r = json::parse(slurp(dir / "gold_srl.json"))["runs"][0];
    for (const char* k : {"micro_f1", "macro_f1", "identification_f1", "accuracy"}) EXPECT_EQ(r[k], 1.0) << k;

    const auto dp = run({"eval", "--predictions", at("dp.test.conllu"), "--gold", at("dp.test.conllu"), "--task", "dp",
                         "--out", at("gold_dp.json")});
    ASSERT_EQ(dp.code, 0) << dp.err;
    const json d = json::parse(slurp(dir / "gold_dp.json"))["runs"][0];
    EXPECT_EQ(d["uas"], 1.0);
    EXPECT_EQ(d["las"], 1.0);
    EXPECT_EQ(d["root"], 1.0);
}

TEST_F(Cli, SpanGivenPredictionsKeepGoldSpans) {
    ASSERT_EQ(run({"train", "--task", "srl", "--setting", "span_given", "--train", at("srl.train.jsonl"), "--dev",
                   at("srl.dev.jsonl"), "--config", at("tiny.json"), "--out", at("span.ckpt")})
                  .code,
              0);
    const auto p = run({"predict", "--checkpoint", at("span.ckpt"), "--data", at("srl.test.jsonl"), "--task", "srl",
                        "--out", at("span_pred.jsonl")});
    ASSERT_EQ(p.code, 0) << p.err;
    const auto gold = corpus::read_any(dir / "srl.test.jsonl");
    const auto pred = corpus::read_any(dir / "span_pred.jsonl");
    ASSERT_EQ(pred.size(), gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ASSERT_EQ(pred[i].frames->size(), gold[i].frames->size());
        for (std::size_t f = 0; f < gold[i].frames->size(); ++f) {
            const auto& ga = (*gold[i].frames)[f].arguments;
            const auto& pa = (*pred[i].frames)[f].arguments;
            ASSERT_EQ(pa.size(), ga.size());
            for (std::size_t a = 0; a < ga.size(); ++a) EXPECT_EQ(pa[a].span, ga[a].span);
        }
    }
    const auto e = run({"eval", "--predictions", at("span_pred.jsonl"), "--gold", at("srl.test.jsonl"), "--task",
                        "srl", "--setting", "span_given", "--out", at("span_eval.json")});
    ASSERT_EQ(e.code, 0) << e.err;
    const json r = json::parse(slurp(dir / "span_eval.json"))["runs"][0];
    EXPECT_EQ(r["micro_f1"], r["accuracy"]);

    EXPECT_EQ(run({"predict", "--checkpoint", at("span.ckpt"), "--data", at("srl.test.jsonl"), "--task", "srl",
                   "--setting", "morpheme", "--out", at("x.jsonl")})
                  .code,
              cli::kConfigError);
}

// The real binary, start to finish.
TEST_F(Cli, BinaryEndToEndWithAblationReport) {
    const std::string bin = MTPARSE_CLI_PATH;
    auto sh = [&](const std::string& args) {
        return std::system((bin + " " + args + " > " + at("log.txt") + " 2>&1").c_str());
    };
    const std::string data = "--dp-train " + at("dp.train.conllu") + " --dp-dev " + at("dp.dev.conllu") +
                             " --srl-train " + at("srl.train.jsonl") + " --srl-dev " + at("srl.dev.jsonl") +
                             " --config " + at("tiny.json");
    ASSERT_EQ(sh("train-multi " + data + " --out " + at("full.ckpt")), 0) << slurp(dir / "log.txt");
    ASSERT_EQ(sh("train-multi " + data + " --no-bilstm --out " + at("nobilstm.ckpt")), 0) << slurp(dir / "log.txt");
    for (const char* m : {"full", "nobilstm"}) {
        ASSERT_EQ(sh(std::string("eval --task srl --checkpoint ") + at(std::string(m) + ".ckpt") + " --data " +
                     at("srl.test.jsonl") + " --out " + at(std::string(m) + "_eval.json")),
                  0)
            << slurp(dir / "log.txt");
    }
    ASSERT_EQ(sh("ablation-report --run " + at("full_eval.json") + " --run " + at("nobilstm_eval.json") +
                 " --out " + at("ablation.md")),
              0)
        << slurp(dir / "log.txt");
    const std::string table = slurp(dir / "ablation.md");
    EXPECT_NE(table.find("micro F1"), std::string::npos) << table;
    EXPECT_NE(table.find("macro F1"), std::string::npos) << table;
    EXPECT_NE(table.find("- BiLSTM"), std::string::npos) << table;
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4) << table;

    EXPECT_EQ(WEXITSTATUS(sh("eval --task srl --checkpoint " + at("absent.ckpt") + " --data " + at("srl.test.jsonl"))),
              3);
}
