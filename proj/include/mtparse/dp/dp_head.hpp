#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/numerics/random.hpp"
#include "mtparse/numerics/tape.hpp"

namespace mtparse::dp {

using numerics::Parameter;
using numerics::Rng;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

struct DpHeadConfig {
    int input_dim = 128;  // h
    int score_dim = 0;    // d; 0 means d = h
    std::vector<std::string> labels;
    double dropout = 0.0;  // applied to the unit vectors before scoring

    int resolved_score_dim() const noexcept { return score_dim > 0 ? score_dim : input_dim; }
    void validate() const;
    friend bool operator==(const DpHeadConfig&, const DpHeadConfig&) = default;
};

/// Per-dependent head (CoNLL numbering, 0 = root) and label.
struct DpPrediction {
    std::vector<int> heads;
    std::vector<std::string> labels;
    bool has_cycle = false;
};

/// Head selection over unit vectors X (m x h) where rows 0..n-1 are SUWs
/// and row n = m-1 is [ROOT]:
///   s(x_j, x_i)   = vᵀ tanh(U x_j + W x_i)
///   g(l, x_j, x_i) = u_lᵀ tanh(U x_j + W x_i)
/// with a softmax over candidates j ≠ i for the head and over labels for the
/// edge label. U, W are d x h, v is d x 1, and the u_l rows form an L x d matrix.
class DpHead {
  public:
    DpHead() = default;
    DpHead(const DpHeadConfig& config, Rng& rng);

    /// tanh(U x_j + W x_i) for every dependent i < n and candidate j < m;
    /// row i*m + j. Dropout on `units` only when `train`.
    Var pair_features(Tape& tape, const Var& units, bool train, Rng& dropout_rng);
    /// n x m raw scores from pair features.
    Var score_heads(Tape& tape, const Var& pair_features, std::size_t n, std::size_t m);
    /// Mask entries (i, i): a token never heads itself.
    static std::vector<char> self_mask(std::size_t n, std::size_t m);
    /// n x m log P_head.
    Var head_log_probs(Tape& tape, const Var& pair_features, std::size_t n, std::size_t m);
    /// n x L log P_label for the edges (chosen_heads[i] -> i); heads are unit indices.
    Var label_log_probs(Tape& tape, const Var& pair_features, std::size_t m, std::span<const int> chosen_heads);

    /// -Σ_i [log P_head(gold_i | i) + log P_label(label_i | gold_i, i)], unnormalized.
    Var loss_sum(Tape& tape, const Var& units, std::span<const int> gold_head_units, std::span<const int> gold_labels,
                 bool train, Rng& dropout_rng);

    /// Greedy argmax head (ties to the lowest unit index), then argmax label.
    DpPrediction decode(const Var& units);

    /// Probability that each SUW attaches to [ROOT] (eval mode).
    std::vector<double> root_probabilities(const Var& units);

    int label_index(const std::string& label) const;
    const DpHeadConfig& config() const noexcept { return config_; }
    std::vector<Parameter*> parameters();

    Parameter& U() { return u_proj_; }
    Parameter& W() { return w_proj_; }
    Parameter& v() { return v_; }
    Parameter& label_vectors() { return label_vectors_; }

  private:
    DpHeadConfig config_;
    Parameter u_proj_, w_proj_, v_, label_vectors_;
};

/// Unit index of a CoNLL head for a sentence of n SUWs (root maps to n).
inline int head_to_unit(int conll_head, int n) { return conll_head == 0 ? n : conll_head - 1; }
inline int unit_to_head(int unit, int n) { return unit == n ? 0 : unit + 1; }

/// True when following heads from some token revisits a token.
bool has_cycle(std::span<const int> conll_heads);

}  // namespace mtparse::dp
