#include <gtest/gtest.h>

#include <cmath>

#include "gradcases.hpp"
#include "mtparse/dp/dp_head.hpp"
#include "mtparse/dp/metrics.hpp"
#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"
#include "oracles.hpp"

using namespace mtparse;
using namespace mtparse::dp;

namespace {

DpHead make_head(int h, int d, std::vector<std::string> labels, std::uint64_t seed = 1) {
    DpHeadConfig c;
    c.input_dim = h;
    c.score_dim = d;
    c.labels = std::move(labels);
    numerics::Rng rng(seed);
    return DpHead(c, rng);
}

corpus::Sentence gold_sentence(std::vector<int> heads, std::vector<std::string> labels) {
    corpus::Sentence s;
    s.id = "g";
    for (std::size_t i = 0; i < heads.size(); ++i) s.suw.push_back("w");
    s.luw_spans = corpus::trivial_luw_spans(s.size());
    s.heads = std::move(heads);
    s.dep_labels = std::move(labels);
    return s;
}

Tensor scores_of(DpHead& head, const Tensor& units) {
    Tape t;
    numerics::Rng r(0);
    const std::size_t m = units.rows();
    Var pf = head.pair_features(t, t.constant(units), false, r);
    return head.score_heads(t, pf, m - 1, m).value();
}

}  // namespace

TEST(DpScores, ZeroProjectionsGiveZeroScores) {
    auto head = make_head(3, 4, {"a", "b"});
    head.U().value.fill(0.0);
    head.W().value.fill(0.0);
    testkit::Rng rng(1);
    const Tensor s = scores_of(head, testkit::random_tensor(4, 3, rng));
    for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(DpScores, SaturationInOneDimension) {
    auto head = make_head(1, 1, {"a"});
    head.U().value.fill(1.0);
    head.W().value.fill(0.0);
    head.v().value.fill(1.0);
    // unit 0 is the dependent; the candidate is the [ROOT] row.
    const Tensor zero = scores_of(head, Tensor({2, 1}, {0.3, 0.0}));
    EXPECT_EQ(zero(0, 1), 0.0);
    const Tensor big = scores_of(head, Tensor({2, 1}, {0.3, 40.0}));
    EXPECT_NEAR(big(0, 1), 1.0, 1e-15);
}

TEST(DpScores, MatchDirectFormula) {
    auto head = make_head(5, 4, {"a", "b", "c"}, 3);
    testkit::Rng rng(2);
    const Tensor x = testkit::random_tensor(4, 5, rng);
    const Tensor s = scores_of(head, x);
    const auto U = testkit::to_matrix(head.U().value), W = testkit::to_matrix(head.W().value);
    const auto v = testkit::to_matrix(head.v().value);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double ref = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                double z = 0.0;
                for (std::size_t c = 0; c < 5; ++c) z += U[k][c] * x(j, c) + W[k][c] * x(i, c);
                ref += v[k][0] * std::tanh(z);
            }
            EXPECT_NEAR(s(i, j), ref, 1e-12);
        }
}

TEST(DpDistributions, NormalizedAndSelfMasked) {
    auto head = make_head(4, 4, {"a", "b"}, 5);
    testkit::Rng rng(3);
    const Tensor x = testkit::random_tensor(6, 4, rng, 2.0);
    Tape t;
    numerics::Rng r(0);
    Var pf = head.pair_features(t, t.constant(x), false, r);
    const Tensor lp = head.head_log_probs(t, pf, 5, 6).value();
    for (std::size_t i = 0; i < 5; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < 6; ++j) total += std::exp(lp(i, j));
        EXPECT_NEAR(total, 1.0, 1e-9);
        EXPECT_EQ(std::exp(lp(i, i)), 0.0);
    }
}

TEST(DpDistributions, EqualLabelVectorsAreUniformAndSingleLabelIsCertain) {
    auto head = make_head(3, 3, {"a", "b", "c", "d"}, 7);
    for (std::size_t l = 0; l < 4; ++l)
        for (std::size_t k = 0; k < 3; ++k) head.label_vectors().value(l, k) = 0.4 * static_cast<double>(k);
    testkit::Rng rng(4);
    const Tensor x = testkit::random_tensor(3, 3, rng);
    Tape t;
    numerics::Rng r(0);
    Var pf = head.pair_features(t, t.constant(x), false, r);
    const std::vector<int> heads{2, 0};
    const Tensor lp = head.label_log_probs(t, pf, 3, heads).value();
    for (double v : lp.values()) EXPECT_NEAR(std::exp(v), 0.25, 1e-12);

    auto single = make_head(3, 3, {"only"}, 8);
    Tape t2;
    Var pf2 = single.pair_features(t2, t2.constant(x), false, r);
    for (double v : single.label_log_probs(t2, pf2, 3, heads).value().values()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(DpLoss, MatchesScalarOracle) {
    testkit::Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        auto head = make_head(4, 3, {"a", "b", "c"}, 100 + trial);
        const Tensor x = testkit::random_tensor(4, 4, rng);  // 3 tokens + [ROOT]
        const auto s = testkit::random_tree_sentence(rng, 3, {"a", "b", "c"}, "r");
        std::vector<int> hu, lab;
        for (int i = 0; i < 3; ++i) {
            hu.push_back(head_to_unit((*s.heads)[i], 3));
            lab.push_back(head.label_index((*s.dep_labels)[i]));
        }
        Tape t;
        numerics::Rng r(0);
        const double got = head.loss_sum(t, t.constant(x), hu, lab, false, r).value().item();
        const double ref = testkit::dp_loss_sum(testkit::to_matrix(head.U().value), testkit::to_matrix(head.W().value),
                                                testkit::to_matrix(head.v().value),
                                                testkit::to_matrix(head.label_vectors().value),
                                                testkit::to_matrix(x), hu, lab);
        EXPECT_NEAR(got, ref, 1e-10);
        EXPECT_GE(got, 0.0);
    }
}

TEST(DpLoss, UniformModelClosedForm) {
    for (int n : {1, 3, 6}) {
        auto head = make_head(4, 4, {"a", "b", "c", "d", "e"});
        head.U().value.fill(0.0);
        head.W().value.fill(0.0);
        testkit::Rng rng(n);
        const Tensor x = testkit::random_tensor(n + 1, 4, rng);
        std::vector<int> hu(n, n), lab(n, 2);
        Tape t;
        numerics::Rng r(0);
        const double per_token = head.loss_sum(t, t.constant(x), hu, lab, false, r).value().item() / n;
        // n candidates per dependent: the other n-1 tokens plus [ROOT]
        EXPECT_NEAR(per_token, std::log(static_cast<double>(n)) + std::log(5.0), 1e-9);
    }
}

TEST(DpLoss, RejectsSelfHeadAndBadLabel) {
    auto head = make_head(2, 2, {"a"});
    Tape t;
    numerics::Rng r(0);
    Var x = t.constant(Tensor(3, 2, 0.1));
    const std::vector<int> self{0, 2}, ok{2, 0}, lab{0, 0}, bad_lab{0, 3};
    EXPECT_THROW(head.loss_sum(t, x, self, lab, false, r), DataError);
    EXPECT_THROW(head.loss_sum(t, x, ok, bad_lab, false, r), DataError);
    EXPECT_THROW(head.pair_features(t, t.constant(Tensor(3, 5)), false, r), ShapeError);
}

TEST(DpDecode, TiesGoToLowestCandidate) {
    auto head = make_head(3, 3, {"x", "y"});
    head.U().value.fill(0.0);
    head.W().value.fill(0.0);
    head.label_vectors().value.fill(0.0);
    Tape t;
    const auto pred = head.decode(t.constant(Tensor(4, 3, 0.5)));
    // unit 0 may not head itself, so its lowest candidate is unit 1 (CoNLL 2)
    EXPECT_EQ(pred.heads, (std::vector<int>{2, 1, 1}));
    EXPECT_EQ(pred.labels, (std::vector<std::string>{"x", "x", "x"}));
    EXPECT_TRUE(pred.has_cycle);
}

TEST(DpMetrics, HandCountedExamples) {
    const auto gold = gold_sentence({2, 0, 2}, {"a", "root", "b"});
    DpPrediction p{{2, 0, 1}, {"a", "root", "b"}, false};
    auto m = evaluate_dp(std::span(&p, 1), std::span(&gold, 1));
    EXPECT_DOUBLE_EQ(m.uas, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.las, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.root, 1.0);

    DpPrediction same{{2, 0, 2}, {"a", "root", "b"}, false};
    m = evaluate_dp(std::span(&same, 1), std::span(&gold, 1));
    EXPECT_EQ(m.uas, 1.0);
    EXPECT_EQ(m.las, 1.0);
    EXPECT_EQ(m.root, 1.0);

    DpPrediction wrong_labels{{2, 0, 2}, {"x", "x", "x"}, false};
    m = evaluate_dp(std::span(&wrong_labels, 1), std::span(&gold, 1));
    EXPECT_EQ(m.uas, 1.0);
    EXPECT_EQ(m.las, 0.0);

    DpPrediction cyc{{2, 1, 0}, {"a", "a", "a"}, true};
    m = evaluate_dp(std::span(&cyc, 1), std::span(&gold, 1));
    EXPECT_EQ(m.cycles, 1);
    EXPECT_EQ(m.root, 0.0);

    DpPrediction short_pred{{2, 0}, {"a", "a"}, false};
    EXPECT_THROW(evaluate_dp(std::span(&short_pred, 1), std::span(&gold, 1)), DataError);
}

TEST(DpMetrics, MatchesBruteForceOnRandomCases) {
    testkit::Rng rng(77);
    const std::vector<std::string> labels{"a", "b", "c"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<corpus::Sentence> gold;
        std::vector<DpPrediction> preds;
        std::vector<std::vector<int>> ph;
        std::vector<std::vector<std::string>> pl;
        const int n_sent = testkit::uniform_int(rng, 1, 4);
        for (int s = 0; s < n_sent; ++s) {
            const int n = testkit::uniform_int(rng, 1, 6);
            gold.push_back(testkit::random_tree_sentence(rng, n, labels, "s" + std::to_string(s)));
            DpPrediction p;
            for (int i = 0; i < n; ++i) {
                p.heads.push_back(testkit::uniform_int(rng, 0, n));
                p.labels.push_back(labels[testkit::uniform_int(rng, 0, 2)]);
            }
            ph.push_back(p.heads);
            pl.push_back(p.labels);
            preds.push_back(p);
        }
        const auto m = evaluate_dp(preds, gold);
        const auto c = testkit::count_dp(ph, pl, gold);
        EXPECT_EQ(m.tokens, c.tokens);
        EXPECT_EQ(m.uas, static_cast<double>(c.head_hits) / static_cast<double>(c.tokens));
        EXPECT_EQ(m.las, static_cast<double>(c.label_hits) / static_cast<double>(c.tokens));
        EXPECT_EQ(m.root, static_cast<double>(c.root_hits) / static_cast<double>(c.sentences));
        EXPECT_LE(m.las, m.uas);
    }
}

TEST(DpHelpers, UnitConversionAndCycles) {
    EXPECT_EQ(head_to_unit(0, 4), 4);
    EXPECT_EQ(head_to_unit(3, 4), 2);
    EXPECT_EQ(unit_to_head(4, 4), 0);
    EXPECT_EQ(unit_to_head(2, 4), 3);
    EXPECT_FALSE(has_cycle(std::vector<int>{2, 0, 2}));
    EXPECT_TRUE(has_cycle(std::vector<int>{2, 3, 1}));
    EXPECT_TRUE(has_cycle(std::vector<int>{0, 3, 2}));
}

TEST(DpGradient, FullLossMatchesFiniteDifferences) {
    for (const auto& c : testkit::model_gradient_cases(31)) {
        if (c.name.rfind("J_dp", 0) != 0) continue;
        const auto r = c.run();
        EXPECT_LT(r.max_relative_error, 1e-4) << c.name << " worst " << r.worst_entry;
    }
}
