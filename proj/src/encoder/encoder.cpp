#include "mtparse/encoder/encoder.hpp"

#include <array>
#include <numeric>

#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"

namespace mtparse::encoder {

namespace ops = mtparse::numerics;
using numerics::Tensor;

BiLstm::BiLstm(const std::string& name, int input_dim, int hidden, int layers, Rng& rng)
    : input_dim_(input_dim), hidden_(hidden) {
    if (hidden <= 0 || hidden % 2 != 0) throw ConfigError(name + ": hidden size must be positive and even");
    if (layers < 1) throw ConfigError(name + ": need at least one layer");
    const std::size_t half = hidden / 2;
    auto make = [&](const std::string& prefix, std::size_t in) {
        Direction d;
        d.w_ih = Parameter(prefix + ".w_ih", numerics::uniform_tensor(in, 4 * half, numerics::glorot_bound(in, 4 * half), rng));
        d.w_hh = Parameter(prefix + ".w_hh",
                           numerics::uniform_tensor(half, 4 * half, numerics::glorot_bound(half, 4 * half), rng));
        Tensor bias(1, 4 * half);
        for (std::size_t k = half; k < 2 * half; ++k) bias[k] = 1.0;  // forget gate
        d.b = Parameter(prefix + ".b", std::move(bias));
        return d;
    };
    for (int l = 0; l < layers; ++l) {
        const std::size_t in = l == 0 ? static_cast<std::size_t>(input_dim) : static_cast<std::size_t>(hidden);
        fwd_.push_back(make(name + ".l" + std::to_string(l) + ".fwd", in));
        bwd_.push_back(make(name + ".l" + std::to_string(l) + ".bwd", in));
    }
}

Var BiLstm::run(Tape& tape, const Var& x, Direction& dir, bool reverse) {
    const std::size_t steps = x.rows();
    const std::size_t half = hidden_ / 2;
    Var w_ih = tape.param(dir.w_ih), w_hh = tape.param(dir.w_hh), b = tape.param(dir.b);
    Var h = tape.constant(Tensor(1, half));
    Var c = tape.constant(Tensor(1, half));
    std::vector<Var> out(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t t = reverse ? steps - 1 - k : k;
        auto step = ops::lstm_cell_step(ops::slice_rows(x, t, t + 1), h, c, w_ih, w_hh, b);
        h = step.h;
        c = step.c;
        out[t] = h;
    }
    return ops::concat_rows(out);
}

Var BiLstm::forward(Tape& tape, const Var& x) {
    if (x.cols() != static_cast<std::size_t>(input_dim_)) {
        throw ShapeError("BiLSTM expects width " + std::to_string(input_dim_) + ", got " + x.value().shape_string());
    }
    Var cur = x;
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
        const std::array<Var, 2> halves{run(tape, cur, fwd_[l], false), run(tape, cur, bwd_[l], true)};
        cur = ops::concat_cols(halves);
    }
    return cur;
}

std::vector<Parameter*> BiLstm::parameters() {
    std::vector<Parameter*> out;
    for (std::size_t l = 0; l < fwd_.size(); ++l) {
        for (Direction* d : {&fwd_[l], &bwd_[l]}) {
            out.push_back(&d->w_ih);
            out.push_back(&d->w_hh);
            out.push_back(&d->b);
        }
    }
    return out;
}

void EncoderConfig::validate() const {
    if (vocab_size <= tokenize::kNumSpecial) throw ConfigError("encoder: vocabulary not set");
    if (embed_dim < 1) throw ConfigError("encoder: embed_dim must be >= 1");
    if (hidden < 2 || hidden % 2 != 0) throw ConfigError("encoder: hidden must be even and >= 2");
    if (layers < 1) throw ConfigError("encoder: layers must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("encoder: dropout must lie in [0, 1)");
    if (max_tokens < 4) throw ConfigError("encoder: max_tokens must be >= 4");
}

Encoder::Encoder(const EncoderConfig& config, Rng& rng) : config_(config) {
    config_.validate();
    const std::size_t e = config_.embed_dim;
    const double bound = 0.1;
    token_embedding_ = Parameter("encoder.token_embedding", numerics::uniform_tensor(config_.vocab_size, e, bound, rng));
    segment_embedding_ = Parameter("encoder.segment_embedding", numerics::uniform_tensor(2, e, bound, rng));
    position_embedding_ =
        Parameter("encoder.position_embedding", numerics::uniform_tensor(config_.max_tokens, e, bound, rng));
    stack_ = BiLstm("encoder.bilstm", config_.embed_dim, config_.hidden, config_.layers, rng);
}

Var Encoder::encode(Tape& tape, const tokenize::AssembledInput& input, bool train, Rng& dropout_rng) {
    const int n = input.length();
    if (n > config_.max_tokens) {
        throw LengthError("input of " + std::to_string(n) + " tokens exceeds max_tokens " +
                          std::to_string(config_.max_tokens));
    }
    for (int id : input.token_ids) {
        if (id < 0 || id >= config_.vocab_size) throw DataError("token id " + std::to_string(id) + " outside vocabulary");
    }
    std::vector<int> positions(n);
    std::iota(positions.begin(), positions.end(), 0);
    Var tok = ops::embedding(tape.param(token_embedding_), input.token_ids);
    Var seg = ops::embedding(tape.param(segment_embedding_), input.segment_ids);
    Var pos = ops::embedding(tape.param(position_embedding_), positions);
    Var x = ops::add(ops::add(tok, seg), pos);
    return numerics::apply_dropout(stack_.forward(tape, x), config_.dropout, train, dropout_rng);
}

std::vector<Parameter*> Encoder::parameters() {
    std::vector<Parameter*> out{&token_embedding_, &segment_embedding_, &position_embedding_};
    for (Parameter* p : stack_.parameters()) out.push_back(p);
    return out;
}

}  // namespace mtparse::encoder
