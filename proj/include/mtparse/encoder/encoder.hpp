#pragma once

#include <string>
#include <vector>

#include "mtparse/numerics/random.hpp"
#include "mtparse/numerics/tape.hpp"
#include "mtparse/tokenize/assemble.hpp"

namespace mtparse::encoder {

using numerics::Parameter;
using numerics::Rng;
using numerics::Tape;
using numerics::Var;

/// Stack of bidirectional LSTM layers; each direction has hidden/2 units
/// and a layer's output is [forward | backward].
class BiLstm {
  public:
    BiLstm() = default;
    BiLstm(const std::string& name, int input_dim, int hidden, int layers, Rng& rng);

    /// x is T x input_dim; returns T x hidden.
    Var forward(Tape& tape, const Var& x);

    int input_dim() const noexcept { return input_dim_; }
    int hidden() const noexcept { return hidden_; }
    std::vector<Parameter*> parameters();

  private:
    struct Direction {
        Parameter w_ih, w_hh, b;
    };
    Var run(Tape& tape, const Var& x, Direction& dir, bool reverse);

    int input_dim_ = 0;
    int hidden_ = 0;
    std::vector<Direction> fwd_, bwd_;
};

struct EncoderConfig {
    int vocab_size = 0;
    int embed_dim = 64;
    int hidden = 128;
    int layers = 2;
    double dropout = 0.1;  // applied to the encoder output
    int max_tokens = tokenize::kDefaultMaxTokens;

    void validate() const;
    friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// Shared encoder: token + segment + position embeddings fed through a
/// BiLSTM stack, one h-wide vector per input position.
class Encoder {
  public:
    Encoder() = default;
    Encoder(const EncoderConfig& config, Rng& rng);

    /// Dropout is drawn from `dropout_rng` only when `train` is set.
    Var encode(Tape& tape, const tokenize::AssembledInput& input, bool train, Rng& dropout_rng);

    const EncoderConfig& config() const noexcept { return config_; }
    std::vector<Parameter*> parameters();

  private:
    EncoderConfig config_;
    Parameter token_embedding_, segment_embedding_, position_embedding_;
    BiLstm stack_;
};

}  // namespace mtparse::encoder
