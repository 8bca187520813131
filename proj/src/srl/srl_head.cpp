#include "mtparse/srl/srl_head.hpp"

#include <algorithm>
#include <array>

#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"

namespace mtparse::srl {

namespace ops = mtparse::numerics;

void SrlHeadConfig::validate() const {
    if (input_dim < 2 || input_dim % 2 != 0) throw ConfigError("srl head: input_dim must be even and >= 2");
    if (mlp_hidden < 0) throw ConfigError("srl head: mlp_hidden must be >= 0");
    if (tagset.empty()) throw ConfigError("srl head: empty tagset");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("srl head: dropout must lie in [0, 1)");
}

SrlHead::SrlHead(const SrlHeadConfig& config, Rng& rng) : config_(config) {
    config_.validate();
    if (config_.use_bilstm) lstm_ = encoder::BiLstm("srl.bilstm", config_.input_dim + 1, config_.input_dim, 1, rng);
    const std::size_t in = 2 * static_cast<std::size_t>(config_.unit_width());
    const std::size_t hid = config_.resolved_mlp_hidden();
    const std::size_t out = config_.tagset.size();
    w1_ = Parameter("srl.mlp.w1", numerics::uniform_tensor(in, hid, numerics::glorot_bound(in, hid), rng));
    b1_ = Parameter("srl.mlp.b1", Tensor(1, hid));
    w2_ = Parameter("srl.mlp.w2", numerics::uniform_tensor(hid, out, numerics::glorot_bound(hid, out), rng));
    b2_ = Parameter("srl.mlp.b2", Tensor(1, out));
}

Var SrlHead::logits(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input, bool train,
                    Rng& dropout_rng) {
    if (hidden.cols() != static_cast<std::size_t>(config_.input_dim)) {
        throw ShapeError("srl head expects width " + std::to_string(config_.input_dim) + ", got " +
                         hidden.value().shape_string());
    }
    if (hidden.rows() != input.predicate_indicator.size()) {
        throw ShapeError("srl head: " + hidden.value().shape_string() + " hidden rows for " +
                         std::to_string(input.predicate_indicator.size()) + " positions");
    }
    if (input.predicate_units.empty()) throw DataError("srl input has no predicate unit");
    if (input.target_units.empty()) throw DataError("srl input has no target unit");

    Tensor flags(input.predicate_indicator.size(), 1);
    for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = input.predicate_indicator[i];
    const std::array<Var, 2> parts{hidden, tape.constant(std::move(flags))};
    Var g = ops::concat_cols(parts);
    if (config_.use_bilstm) g = numerics::apply_dropout(lstm_.forward(tape, g), config_.dropout, train, dropout_rng);

    Var units = ops::mean_over_sets(g, input.unit_map);
    Var pred = ops::mean_over_sets(units, {input.predicate_units});
    Var targets = ops::gather_rows(units, input.target_units);
    const std::array<Var, 2> features{targets, ops::repeat_rows(pred, input.target_units.size())};
    Var h = ops::tanh(ops::add(ops::matmul(ops::concat_cols(features), tape.param(w1_)), tape.param(b1_)));
    return ops::add(ops::matmul(h, tape.param(w2_)), tape.param(b2_));
}

Var SrlHead::log_probs(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input, bool train,
                       Rng& dropout_rng) {
    return ops::log_softmax(logits(tape, hidden, input, train, dropout_rng));
}

Var SrlHead::loss_sum(Tape& tape, const Var& hidden, const tokenize::AssembledInput& input,
                      std::span<const int> gold, bool train, Rng& dropout_rng) {
    if (gold.size() != input.target_units.size()) {
        throw DataError(std::to_string(gold.size()) + " gold tags for " + std::to_string(input.target_units.size()) +
                        " units");
    }
    for (int t : gold) {
        if (t < 0 || t >= static_cast<int>(config_.tagset.size())) throw DataError("gold tag index out of range");
    }
    Var lp = ops::pick(log_probs(tape, hidden, input, train, dropout_rng), gold);
    return ops::scale(ops::sum(lp), -1.0);
}

std::vector<int> SrlHead::predict(const Var& hidden, const tokenize::AssembledInput& input) {
    Tape tape;
    Rng unused(0);
    const Tensor scores = logits(tape, tape.constant(hidden.value()), input, false, unused).value();
    std::vector<int> out(scores.rows());
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.cols(); ++c) {
            if (scores(r, c) > scores(r, best)) best = c;
        }
        out[r] = static_cast<int>(best);
    }
    return out;
}

int SrlHead::tag_index(const std::string& tag) const {
    auto it = std::find(config_.tagset.begin(), config_.tagset.end(), tag);
    return it == config_.tagset.end() ? -1 : static_cast<int>(it - config_.tagset.begin());
}

std::vector<Parameter*> SrlHead::parameters() {
    std::vector<Parameter*> out;
    if (config_.use_bilstm) out = lstm_.parameters();
    for (Parameter* p : {&w1_, &b1_, &w2_, &b2_}) out.push_back(p);
    return out;
}

}  // namespace mtparse::srl
