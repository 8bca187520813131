#pragma once

#include <span>
#include <string>
#include <vector>

#include "mtparse/encoder/encoder.hpp"
#include "mtparse/numerics/random.hpp"
#include "mtparse/numerics/tape.hpp"
#include "mtparse/tokenize/assemble.hpp"

namespace mtparse::srl {

using numerics::Parameter;
using numerics::Rng;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

struct SrlHeadConfig {
    int input_dim = 128;   // encoder width h
    int mlp_hidden = 0;    // 0 means the MLP hidden layer is h wide
    std::vector<std::string> tagset;
    double dropout = 0.0;  // on the BiLSTM output
    bool use_bilstm = true;

    int resolved_mlp_hidden() const noexcept { return mlp_hidden > 0 ? mlp_hidden : input_dim; }
    /// Width of each averaged unit vector fed to the MLP (twice this is the MLP input).
    int unit_width() const noexcept { return use_bilstm ? input_dim : input_dim + 1; }
    void validate() const;
    friend bool operator==(const SrlHeadConfig&, const SrlHeadConfig&) = default;
};

/// Tagger over encoder outputs: the predicate indicator is appended as one
/// extra column, a one-layer BiLSTM maps (h+1) -> h, unit vectors are averages
/// of their positions, and each target unit is classified from
/// [unit | predicate] by a one-hidden-layer tanh MLP.
class SrlHead {
  public:
    SrlHead() = default;
    SrlHead(const SrlHeadConfig& config, Rng& rng);

    /// One row of tag scores per target unit.
    Var logits(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input, bool train, Rng& dropout_rng);
    Var log_probs(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input, bool train,
                  Rng& dropout_rng);
    /// -Σ_i log P(gold_i) for one instance.
    Var loss_sum(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input, std::span<const int> gold,
                 bool train, Rng& dropout_rng);
    /// Argmax tag index per target unit (ties to the lowest index), eval mode.
    std::vector<int> predict(const Var& hidden, const tokenize::AssembledInput& input);

    int tag_index(const std::string& tag) const;
    const SrlHeadConfig& config() const noexcept { return config_; }
    std::vector<Parameter*> parameters();

    Parameter& mlp_w1() { return w1_; }
    Parameter& mlp_b1() { return b1_; }
    Parameter& mlp_w2() { return w2_; }
    Parameter& mlp_b2() { return b2_; }

  private:
    SrlHeadConfig config_;
    encoder::BiLstm lstm_;
    Parameter w1_, b1_, w2_, b2_;
};

}  // namespace mtparse::srl
