#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance runner. They work on plain vectors and never call the library
// code they check.

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/numerics/tensor.hpp"
#include "mtparse/srl/metrics.hpp"
#include "mtparse/tokenize/assemble.hpp"

namespace mtparse::testkit {

using Rng = std::mt19937_64;
using Matrix = std::vector<std::vector<double>>;

Matrix to_matrix(const numerics::Tensor& t);
numerics::Tensor to_tensor(const Matrix& m);
numerics::Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double bound = 1.0);

int uniform_int(Rng& rng, int low, int high);  // inclusive

// ---- random structures ----

/// Random single-rooted tree over n tokens with random labels and LUW grouping.
corpus::Sentence random_tree_sentence(Rng& rng, int n, const std::vector<std::string>& labels, const std::string& id);

/// Random set of disjoint labelled spans inside [0, n_units), sorted by begin.
std::vector<corpus::Argument> random_spans(Rng& rng, int n_units, const std::vector<std::string>& roles,
                                           double density = 0.5);

struct OverlapCorpora {
    std::vector<corpus::Sentence> dp;
    std::vector<corpus::Sentence> srl;
    std::size_t shared = 0;
};

/// Two corpora where `overlap` of the SRL sentences reuse a DP sentence id.
OverlapCorpora random_overlap_corpora(Rng& rng, int n_dp, int n_srl, double overlap);

/// Exhaustive check: number of ids that appear in different split names
/// across the two sides, or more than once on one side.
long count_split_leaks(const std::array<std::vector<corpus::Sentence>, 3>& dp,
                       const std::array<std::vector<corpus::Sentence>, 3>& srl);

// ---- metric oracles ----

struct DpCounts {
    long tokens = 0;
    long head_hits = 0;
    long label_hits = 0;
    long sentences = 0;
    long root_hits = 0;
};

DpCounts count_dp(const std::vector<std::vector<int>>& pred_heads,
                  const std::vector<std::vector<std::string>>& pred_labels,
                  const std::vector<corpus::Sentence>& gold);

struct SrlCounts {
    long gold = 0, predicted = 0, correct = 0, identified = 0;
    double micro_p = 0, micro_r = 0, micro_f1 = 0;
    double macro_p = 0, macro_r = 0, macro_f1 = 0;
    double ident_p = 0, ident_r = 0, ident_f1 = 0;
    double accuracy = 0;
};

/// Frames must already be aligned one-to-one.
SrlCounts count_srl(const std::vector<srl::FrameArguments>& predicted, const std::vector<srl::FrameArguments>& gold,
                    bool span_given);

// ---- formula oracles ----

/// One LSTM step, gates (i, f, g, o). Returns h' and writes c'.
std::vector<double> lstm_step(const std::vector<double>& x, const std::vector<double>& h,
                              const std::vector<double>& c, const Matrix& w_ih, const Matrix& w_hh,
                              const std::vector<double>& b, std::vector<double>& c_out);

/// BiLSTM forward from its parameters listed as (w_ih, w_hh, b) for the
/// forward then backward direction of each layer.
Matrix bilstm_forward(const Matrix& x, std::span<const numerics::Parameter* const> params);

/// Unnormalized DP loss -Σ_i [log P_head + log P_label] from raw matrices.
/// U, W are d x h, v is d x 1, labels is L x d, units is (n+1) x h.
double dp_loss_sum(const Matrix& U, const Matrix& W, const Matrix& v, const Matrix& labels, const Matrix& units,
                   const std::vector<int>& head_units, const std::vector<int>& gold_labels);

/// SRL logits from the head parameters (BiLSTM params then w1, b1, w2, b2).
Matrix srl_logits(std::span<const numerics::Parameter* const> params, bool use_bilstm, const Matrix& hidden,
                  const tokenize::AssembledInput& input);

/// -Σ log softmax(logits)[gold] over rows.
double nll(const Matrix& logits, const std::vector<int>& gold);

}  // namespace mtparse::testkit
