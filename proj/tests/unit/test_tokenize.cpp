#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mtparse/corpus/synthetic.hpp"
#include "mtparse/error.hpp"
#include "mtparse/tokenize/assemble.hpp"
#include "mtparse/tokenize/subword.hpp"
#include "oracles.hpp"

using namespace mtparse;
using namespace mtparse::tokenize;
using corpus::Sentence;

namespace {

Sentence words(std::vector<std::string> suw, const std::string& id = "s") {
    Sentence s;
    s.id = id;
    s.suw = std::move(suw);
    s.luw_spans = corpus::trivial_luw_spans(s.size());
    return s;
}

}  // namespace

TEST(Utf8, SplitsCodePointsAndKeepsBadBytes) {
    EXPECT_EQ(utf8_chars("その"), (std::vector<std::string>{"そ", "の"}));
    EXPECT_EQ(utf8_chars("aé"), (std::vector<std::string>{"a", "é"}));
    const std::string bad = std::string("a") + static_cast<char>(0xff) + "b";
    EXPECT_EQ(utf8_chars(bad).size(), 3u);
}

TEST(Bpe, HandCountedFirstMerge) {
    // "aaab" three times: (a,a) occurs 6 times, (a,b) 3 times.
    const std::vector<Sentence> corpus{words({"aaab", "aaab", "aaab"})};
    const auto model = learn_subwords(corpus, 1);
    ASSERT_EQ(model.merges().size(), 1u);
    EXPECT_EQ(model.merges()[0], (SubwordModel::Merge{"a", "a"}));
    const auto ids = model.encode("aaab");
    ASSERT_EQ(ids.size(), 3u);
    EXPECT_EQ(model.token(ids[0]), "aa");
    EXPECT_EQ(model.decode(ids), "aaab");
}

TEST(Bpe, TiesGoToSmallestMergedString) {
    const std::vector<Sentence> corpus{words({"cd", "ab"})};
    const auto model = learn_subwords(corpus, 1);
    EXPECT_EQ(model.merges()[0], (SubwordModel::Merge{"a", "b"}));
}

TEST(Bpe, NeverMergesAcrossSuwBoundaries) {
    const std::vector<Sentence> corpus{words({"a", "b", "a", "b"})};
    const auto model = learn_subwords(corpus, 10);
    EXPECT_TRUE(model.merges().empty());
}

TEST(Bpe, UnknownCharactersMapToUnk) {
    const std::vector<Sentence> corpus{words({"ab"})};
    const auto model = learn_subwords(corpus, 1);
    const auto ids = model.encode("az");
    ASSERT_EQ(ids.size(), 2u);
    EXPECT_EQ(ids[1], kUnk);
}

TEST(Bpe, SerializationRoundTrip) {
    const auto corpus = corpus::generate_synthetic({}, 4);
    const auto model = learn_subwords(corpus, 50);
    const auto back = SubwordModel::deserialize(model.serialize());
    EXPECT_EQ(back, model);
    for (const auto& s : corpus)
        for (const auto& w : s.suw) EXPECT_EQ(back.encode(w), model.encode(w));
}

TEST(Bpe, EncodeDecodeIdentityOnTrainingSurfaces) {
    const auto corpus = corpus::generate_synthetic({}, 4);
    const auto model = learn_subwords(corpus, 200);
    for (const auto& s : corpus)
        for (const auto& w : s.suw) {
            const auto ids = model.encode(w);
            ASSERT_FALSE(ids.empty());
            EXPECT_EQ(model.decode(ids), w);
            for (int id : ids) EXPECT_GE(id, kNumSpecial);
        }
}

TEST(Atomic, OneTokenPerKnownSurface) {
    const std::vector<Sentence> corpus{words({"その", "方"})};
    const auto model = learn_atomic_vocabulary(corpus);
    EXPECT_EQ(model.mode(), SubwordModel::Mode::kAtomic);
    EXPECT_EQ(model.encode("その").size(), 1u);
    EXPECT_EQ(model.encode("未知"), (std::vector<int>{kUnk}));
}

TEST(AssembleDp, RootUnknownTemplate) {
    const auto s = words({"w"});
    const auto model = learn_atomic_vocabulary({s});
    const auto in = assemble_dp(s, DpMode::kRootUnknown, std::nullopt, model);
    const int w = model.encode("w")[0];
    EXPECT_EQ(in.token_ids, (std::vector<int>{kCls, w, kSep, kRoot}));
    EXPECT_EQ(in.unit_map, (UnitMap{{1}, {3}}));
    EXPECT_EQ(in.root_position, 3);
}

TEST(AssembleDp, RootKnownTemplate) {
    const auto s = words({"w"});
    const auto model = learn_atomic_vocabulary({s});
    const auto in = assemble_dp(s, DpMode::kRootKnown, 0, model);
    const int w = model.encode("w")[0];
    EXPECT_EQ(in.token_ids, (std::vector<int>{kCls, w, kSep, w, kSep, kRoot}));
    EXPECT_EQ(in.segment_ids, (std::vector<int>{0, 0, 0, 1, 1, 1}));
    EXPECT_EQ(in.unit_map, (UnitMap{{1}, {5}}));
    EXPECT_THROW(assemble_dp(s, DpMode::kRootKnown, std::nullopt, model), ConfigError);
}

TEST(AssembleDp, LengthLimit) {
    const auto s = words({"a", "b", "c"});
    const auto model = learn_atomic_vocabulary({s});
    EXPECT_THROW(assemble_dp(s, DpMode::kRootUnknown, std::nullopt, model, 5), LengthError);
    EXPECT_NO_THROW(assemble_dp(s, DpMode::kRootUnknown, std::nullopt, model, 6));
}

TEST(AssembleDp, UnitMapPartitionsContentPositions) {
    const auto corpus = corpus::generate_synthetic({}, 8);
    const auto model = learn_subwords(corpus, 30);
    for (const auto& s : corpus) {
        const auto in = assemble_dp(s, DpMode::kRootUnknown, std::nullopt, model);
        std::vector<int> covered;
        for (std::size_t u = 0; u + 1 < in.unit_map.size(); ++u)
            covered.insert(covered.end(), in.unit_map[u].begin(), in.unit_map[u].end());
        std::sort(covered.begin(), covered.end());
        // content positions are 1 .. (position of first [SEP]) - 1
        std::vector<int> content;
        for (int p = 1; in.token_ids[p] != kSep; ++p) content.push_back(p);
        EXPECT_EQ(covered, content);
        EXPECT_EQ(static_cast<int>(in.unit_map.size()), s.size() + 1);
    }
}

TEST(AssembleSrl, PredicateSegmentAndIndicator) {
    Sentence s = words({"その", "方", "は", "別", "ID", "に", "切り替え", "た"}, "fig1");
    s.luw_spans = {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 6}, {6, 7}, {7, 8}};
    corpus::PredicateFrame f{{5, 6}, {{"Agent", {0, 3}}, {"Arrival Point (State)", {3, 5}}}};
    const auto model = learn_subwords({s}, 20);
    const auto in = assemble_srl(s, f, SrlSetting::kMorpheme, model);
    const auto pred_ids = model.encode("切り替え");

    // [CLS] sentence [SEP] predicate [SEP]
    const int second = in.length() - 1 - static_cast<int>(pred_ids.size());
    EXPECT_EQ(in.token_ids.back(), kSep);
    EXPECT_EQ(in.token_ids[second - 1], kSep);
    for (std::size_t k = 0; k < pred_ids.size(); ++k) {
        EXPECT_EQ(in.token_ids[second + k], pred_ids[k]);
        EXPECT_EQ(in.predicate_indicator[second + k], 1);
        EXPECT_EQ(in.segment_ids[second + k], 1);
    }
    for (int p : in.suw_positions[6]) EXPECT_EQ(in.predicate_indicator[p], 1);
    int marked = 0;
    for (int v : in.predicate_indicator) marked += v;
    EXPECT_EQ(marked, 2 * static_cast<int>(pred_ids.size()));

    EXPECT_EQ(in.unit_map.size(), 7u);  // one unit per LUW
    EXPECT_EQ(in.predicate_units, (std::vector<int>{5}));
    EXPECT_EQ(in.target_units.size(), 7u);
}

TEST(AssembleSrl, SpanGivenUnitsAndNoPredicateSegment) {
    Sentence s = words({"a", "b", "c", "d"});
    corpus::PredicateFrame f{{3, 4}, {{"A", {0, 2}}, {"B", {2, 3}}}};
    const auto model = learn_atomic_vocabulary({s});
    const auto in = assemble_srl(s, f, SrlSetting::kSpanGiven, model, 320, false);
    EXPECT_EQ(in.length(), 6);  // [CLS] a b c d [SEP]
    EXPECT_EQ(in.unit_map, (UnitMap{{1, 2}, {3}, {4}}));
    EXPECT_EQ(in.target_units, (std::vector<int>{0, 1}));
    EXPECT_EQ(in.predicate_units, (std::vector<int>{2}));
}

TEST(AverageUnits, MeansOfPositions) {
    numerics::Tensor h({3, 2}, {1, 2, 3, 4, 5, 6});
    const auto out = average_units(h, UnitMap{{0, 2}, {1}});
    EXPECT_EQ(out, numerics::Tensor({2, 2}, {3, 4, 3, 4}));
}

TEST(Modes, ParseAndPrint) {
    EXPECT_EQ(parse_dp_mode("root_known"), DpMode::kRootKnown);
    EXPECT_STREQ(to_string(SrlSetting::kSpanGiven), "span_given");
    EXPECT_THROW(parse_srl_setting("spans"), ConfigError);
}
