#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gradcases.hpp"
#include "mtparse/error.hpp"
#include "mtparse/srl/bio.hpp"
#include "mtparse/srl/metrics.hpp"
#include "mtparse/srl/srl_head.hpp"
#include "mtparse/tokenize/subword.hpp"
#include "oracles.hpp"

using namespace mtparse;
using namespace mtparse::srl;
using corpus::Argument;
using tokenize::SrlSetting;

TEST(Bio, TagsetLayout) {
    EXPECT_EQ(morpheme_tagset({"Agent", "Goal"}),
              (std::vector<std::string>{"O", "B-Agent", "I-Agent", "B-Goal", "I-Goal"}));
}

TEST(Bio, DecodeExamples) {
    EXPECT_EQ(bio_decode({"B-Agent", "I-Agent", "O"}), (std::vector<Argument>{{"Agent", {0, 2}}}));
    EXPECT_TRUE(bio_decode({"O", "O", "O"}).empty());
    EXPECT_EQ(bio_decode({"I-X", "I-Y"}), (std::vector<Argument>{{"X", {0, 1}}, {"Y", {1, 2}}}));
    EXPECT_EQ(bio_decode({"B-X", "O", "I-X"}), (std::vector<Argument>{{"X", {0, 1}}, {"X", {2, 3}}}));
    EXPECT_EQ(bio_decode({"B-X", "B-X", "I-X"}), (std::vector<Argument>{{"X", {0, 1}}, {"X", {1, 3}}}));
    EXPECT_EQ(bio_decode({"junk", "B-", "I-Z"}), (std::vector<Argument>{{"Z", {2, 3}}}));
}

TEST(Bio, EncodeRejectsOverlapAndRange) {
    EXPECT_EQ(encode_spans_as_tags({{"A", {1, 3}}}, 4), (std::vector<std::string>{"O", "B-A", "I-A", "O"}));
    EXPECT_THROW(encode_spans_as_tags({{"A", {0, 2}}, {"B", {1, 3}}}, 4), DataError);
    EXPECT_THROW(encode_spans_as_tags({{"A", {3, 5}}}, 4), DataError);
}

TEST(Bio, RoundTripOnRandomSpanSets) {
    testkit::Rng rng(12);
    const std::vector<std::string> roles{"A", "B", "C"};
    for (int trial = 0; trial < 300; ++trial) {
        const int n = testkit::uniform_int(rng, 0, 12);
        const auto spans = testkit::random_spans(rng, n, roles, 0.6);
        EXPECT_EQ(bio_decode(encode_spans_as_tags(spans, n)), spans);
    }
}

TEST(Bio, RepairIsTotalOnArbitrarySequences) {
    testkit::Rng rng(13);
    const std::vector<std::string> alphabet{"O", "B-A", "I-A", "B-B", "I-B", "I-", "X", ""};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> tags(testkit::uniform_int(rng, 0, 10));
        for (auto& t : tags) t = alphabet[testkit::uniform_int(rng, 0, 7)];
        std::vector<Argument> spans;
        ASSERT_NO_THROW(spans = bio_decode(tags));
        int last_end = 0;
        for (const auto& a : spans) {
            EXPECT_GE(a.span.begin, last_end);
            EXPECT_LT(a.span.begin, a.span.end);
            EXPECT_LE(a.span.end, static_cast<int>(tags.size()));
            EXPECT_FALSE(a.label.empty());
            last_end = a.span.end;
        }
    }
}

namespace {

FrameArguments frame(std::vector<Argument> args, std::string id = "s") {
    return {std::move(id), {9, 10}, std::move(args)};
}

}  // namespace

TEST(SrlMetrics, HandCountedPrecisionRecall) {
    const std::vector<FrameArguments> gold{frame({{"A", {0, 1}}, {"B", {2, 3}}})};
    const std::vector<FrameArguments> pred{frame({{"A", {0, 1}}})};
    const auto r = evaluate_srl(pred, gold, SrlSetting::kMorpheme);
    EXPECT_DOUBLE_EQ(r.micro_precision, 1.0);
    EXPECT_DOUBLE_EQ(r.micro_recall, 0.5);
    EXPECT_DOUBLE_EQ(r.micro_f1, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.macro_f1, 0.5);  // A: 1, B: 0
}

TEST(SrlMetrics, RightSpanWrongLabel) {
    const std::vector<FrameArguments> gold{frame({{"Agent", {0, 2}}})};
    const std::vector<FrameArguments> pred{frame({{"Goal", {0, 2}}})};
    const auto r = evaluate_srl(pred, gold, SrlSetting::kMorpheme);
    EXPECT_EQ(r.identification_f1, 1.0);
    EXPECT_EQ(r.accuracy, 0.0);
    EXPECT_EQ(r.micro_f1, 0.0);
    EXPECT_EQ(r.per_label.size(), 2u);
}

TEST(SrlMetrics, IdenticalPredictionsScoreOne) {
    testkit::Rng rng(3);
    std::vector<FrameArguments> gold;
    for (int k = 0; k < 5; ++k)
        gold.push_back(frame(testkit::random_spans(rng, 8, {"A", "B"}, 0.8), "s" + std::to_string(k)));
    gold[0].arguments = {{"A", {0, 1}}};
    for (auto setting : {SrlSetting::kMorpheme, SrlSetting::kSpanGiven}) {
        const auto r = evaluate_srl(gold, gold, setting);
        EXPECT_EQ(r.micro_f1, 1.0);
        EXPECT_EQ(r.macro_f1, 1.0);
        EXPECT_EQ(r.identification_f1, 1.0);
        EXPECT_EQ(r.accuracy, 1.0);
    }
}

TEST(SrlMetrics, MisalignmentAndSpanGivenContract) {
    const std::vector<FrameArguments> gold{frame({{"A", {0, 1}}})};
    const std::vector<FrameArguments> other_sentence{frame({{"A", {0, 1}}}, "t")};
    EXPECT_THROW(evaluate_srl(other_sentence, gold, SrlSetting::kMorpheme), DataError);
    EXPECT_THROW(evaluate_srl({}, gold, SrlSetting::kMorpheme), DataError);
    const std::vector<FrameArguments> moved{frame({{"A", {0, 2}}})};
    EXPECT_THROW(evaluate_srl(moved, gold, SrlSetting::kSpanGiven), DataError);
}

TEST(SrlMetrics, MatchesBruteForceOnRandomCases) {
    testkit::Rng rng(44);
    const std::vector<std::string> roles{"A", "B", "C", "D"};
    for (int trial = 0; trial < 300; ++trial) {
        const bool span_given = trial % 2 == 1;
        std::vector<FrameArguments> gold, pred;
        const int frames = testkit::uniform_int(rng, 1, 4);
        for (int k = 0; k < frames; ++k) {
            const int n = testkit::uniform_int(rng, 1, 8);
            auto g = testkit::random_spans(rng, n, roles, 0.5);
            auto p = span_given ? g : testkit::random_spans(rng, n, roles, 0.5);
            if (span_given)
                for (auto& a : p) a.label = roles[testkit::uniform_int(rng, 0, 3)];
            gold.push_back(frame(g, "s" + std::to_string(k)));
            pred.push_back(frame(p, "s" + std::to_string(k)));
        }
        const auto r = evaluate_srl(pred, gold, span_given ? SrlSetting::kSpanGiven : SrlSetting::kMorpheme);
        const auto c = testkit::count_srl(pred, gold, span_given);
        EXPECT_EQ(r.gold, c.gold);
        EXPECT_EQ(r.predicted, c.predicted);
        EXPECT_EQ(r.correct, c.correct);
        EXPECT_EQ(r.identified, c.identified);
        EXPECT_EQ(r.micro_precision, c.micro_p);
        EXPECT_EQ(r.micro_recall, c.micro_r);
        EXPECT_EQ(r.micro_f1, c.micro_f1);
        EXPECT_EQ(r.macro_precision, c.macro_p);
        EXPECT_EQ(r.macro_recall, c.macro_r);
        EXPECT_EQ(r.macro_f1, c.macro_f1);
        EXPECT_EQ(r.identification_f1, c.ident_f1);
        EXPECT_EQ(r.accuracy, c.accuracy);
        EXPECT_GE(r.identification_f1, r.micro_f1);
        if (span_given) EXPECT_EQ(r.micro_f1, r.accuracy);
    }
}

TEST(SrlMetrics, LabelCsv) {
    const std::vector<FrameArguments> gold{frame({{"A", {0, 1}}, {"B", {2, 3}}})};
    const std::vector<FrameArguments> pred{frame({{"A", {0, 1}}})};
    std::ostringstream out;
    write_label_csv(out, evaluate_srl(pred, gold, SrlSetting::kMorpheme));
    EXPECT_EQ(out.str(),
              "label,gold,predicted,correct,precision,recall,f1\n"
              "A,1,1,1,1.000000,1.000000,1.000000\n"
              "B,1,0,0,0.000000,0.000000,0.000000\n");
}

namespace {

struct Tagger {
    corpus::Sentence sentence;
    corpus::PredicateFrame frame;
    tokenize::SubwordModel model;
    SrlHead head;
    tokenize::AssembledInput input;
    Tensor hidden;

    Tagger(SrlSetting setting, bool use_bilstm, std::uint64_t seed, int n_luw = 3) {
        for (int i = 0; i < n_luw + 1; ++i) sentence.suw.push_back("w" + std::to_string(i));
        sentence.id = "t";
        sentence.luw_spans = {{0, 2}};
        for (int i = 2; i <= n_luw; ++i) sentence.luw_spans.push_back({i, i + 1});
        frame = {{n_luw - 1, n_luw}, {{"Agent", {0, 1}}, {"Goal", {1, 2}}}};
        model = tokenize::learn_atomic_vocabulary({sentence});
        SrlHeadConfig c;
        c.input_dim = 4;
        c.mlp_hidden = 5;
        c.tagset = setting == SrlSetting::kMorpheme ? morpheme_tagset({"Agent", "Goal"})
                                                     : std::vector<std::string>{"Agent", "Goal"};
        c.use_bilstm = use_bilstm;
        numerics::Rng rng(seed);
        head = SrlHead(c, rng);
        input = tokenize::assemble_srl(sentence, frame, setting, model);
        testkit::Rng data(seed + 1);
        hidden = testkit::random_tensor(static_cast<std::size_t>(input.length()), 4, data);
    }

    std::vector<const numerics::Parameter*> params() {
        const auto ps = head.parameters();
        return {ps.begin(), ps.end()};
    }
};

}  // namespace

TEST(SrlForward, ZeroMlpIsUniform) {
    Tagger t(SrlSetting::kMorpheme, true, 1);
    t.head.mlp_w1().value.fill(0.0);
    t.head.mlp_w2().value.fill(0.0);
    Tape tape;
    numerics::Rng r(0);
    const Tensor lp = t.head.log_probs(tape, tape.constant(t.hidden), t.input, false, r).value();
    for (double v : lp.values()) EXPECT_NEAR(v, -std::log(5.0), 1e-12);
}

TEST(SrlForward, DistributionsSumToOne) {
    Tagger t(SrlSetting::kMorpheme, true, 2);
    Tape tape;
    numerics::Rng r(0);
    const Tensor lp = t.head.log_probs(tape, tape.constant(t.hidden), t.input, false, r).value();
    for (std::size_t i = 0; i < lp.rows(); ++i) {
        double total = 0.0;
        for (std::size_t k = 0; k < lp.cols(); ++k) total += std::exp(lp(i, k));
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(SrlForward, MatchesStepByStepOracle) {
    for (auto setting : {SrlSetting::kMorpheme, SrlSetting::kSpanGiven})
        for (bool bilstm : {true, false}) {
            Tagger t(setting, bilstm, 3);
            Tape tape;
            numerics::Rng r(0);
            const Tensor got = t.head.logits(tape, tape.constant(t.hidden), t.input, false, r).value();
            const auto ref = testkit::srl_logits(t.params(), bilstm, testkit::to_matrix(t.hidden), t.input);
            ASSERT_EQ(got.rows(), ref.size());
            for (std::size_t i = 0; i < got.rows(); ++i)
                for (std::size_t k = 0; k < got.cols(); ++k) EXPECT_NEAR(got(i, k), ref[i][k], 1e-10);
        }
}

TEST(SrlLoss, TwoSentenceBatchMatchesOracle) {
    Tagger a(SrlSetting::kMorpheme, true, 4, 3);
    Tagger b(SrlSetting::kMorpheme, true, 4, 5);  // same seed: identical head parameters
    const std::vector<int> gold_a{1, 3, 0}, gold_b{0, 1, 2, 0, 3};
    Tape tape;
    numerics::Rng r(0);
    const double la = a.head.loss_sum(tape, tape.constant(a.hidden), a.input, gold_a, false, r).value().item();
    const double lb = a.head.loss_sum(tape, tape.constant(b.hidden), b.input, gold_b, false, r).value().item();
    const double ref = (testkit::nll(testkit::srl_logits(a.params(), true, testkit::to_matrix(a.hidden), a.input), gold_a) +
                        testkit::nll(testkit::srl_logits(a.params(), true, testkit::to_matrix(b.hidden), b.input), gold_b)) /
                       2.0;
    EXPECT_NEAR((la + lb) / 2.0, ref, 1e-10);
}

TEST(SrlLoss, UniformModelClosedForm) {
    for (int n_luw : {2, 3, 6}) {
        Tagger t(SrlSetting::kMorpheme, true, 5, n_luw);
        t.head.mlp_w2().value.fill(0.0);
        const std::vector<int> gold(n_luw, 2);
        Tape tape;
        numerics::Rng r(0);
        const double loss = t.head.loss_sum(tape, tape.constant(t.hidden), t.input, gold, false, r).value().item();
        EXPECT_NEAR(loss, n_luw * std::log(5.0), 1e-9);
    }
}

TEST(SrlLoss, RejectsBadGold) {
    Tagger t(SrlSetting::kMorpheme, true, 6);
    Tape tape;
    numerics::Rng r(0);
    const std::vector<int> short_gold{0}, bad{0, 0, 9};
    EXPECT_THROW(t.head.loss_sum(tape, tape.constant(t.hidden), t.input, short_gold, false, r), DataError);
    EXPECT_THROW(t.head.loss_sum(tape, tape.constant(t.hidden), t.input, bad, false, r), DataError);
}

TEST(SrlGradient, FullLossMatchesFiniteDifferences) {
    for (const auto& c : testkit::model_gradient_cases(57)) {
        if (c.name.rfind("J_srl", 0) != 0) continue;
        const auto r = c.run();
        EXPECT_LT(r.max_relative_error, 1e-4) << c.name << " worst " << r.worst_entry;
    }
}
