#include "mtparse/dp/dp_head.hpp"

#include <algorithm>
#include <cmath>

#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"

namespace mtparse::dp {

namespace ops = mtparse::numerics;

void DpHeadConfig::validate() const {
    if (input_dim < 1) throw ConfigError("dp head: input_dim must be >= 1");
    if (score_dim < 0) throw ConfigError("dp head: score_dim must be >= 0");
    if (labels.empty()) throw ConfigError("dp head: empty label inventory");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dp head: dropout must lie in [0, 1)");
}

DpHead::DpHead(const DpHeadConfig& config, Rng& rng) : config_(config) {
    config_.validate();
    const std::size_t h = config_.input_dim;
    const std::size_t d = config_.resolved_score_dim();
    const std::size_t l = config_.labels.size();
    u_proj_ = Parameter("dp.U", numerics::uniform_tensor(d, h, numerics::glorot_bound(h, d), rng));
    w_proj_ = Parameter("dp.W", numerics::uniform_tensor(d, h, numerics::glorot_bound(h, d), rng));
    v_ = Parameter("dp.v", numerics::uniform_tensor(d, 1, numerics::glorot_bound(d, 1), rng));
    label_vectors_ = Parameter("dp.label_vectors", numerics::uniform_tensor(l, d, numerics::glorot_bound(d, l), rng));
}

Var DpHead::pair_features(Tape& tape, const Var& units, bool train, Rng& dropout_rng) {
    if (units.cols() != static_cast<std::size_t>(config_.input_dim)) {
        throw ShapeError("dp head expects unit width " + std::to_string(config_.input_dim) + ", got " +
                         units.value().shape_string());
    }
    if (units.rows() < 2) throw ShapeError("dp head needs at least one token and [ROOT], got " +
                                           units.value().shape_string());
    const std::size_t n = units.rows() - 1;
    Var x = numerics::apply_dropout(units, config_.dropout, train, dropout_rng);
    Var heads = ops::matmul_nt(x, tape.param(u_proj_));
    Var deps = ops::matmul_nt(ops::slice_rows(x, 0, n), tape.param(w_proj_));
    return ops::tanh(ops::pairwise_add(heads, deps));
}

Var DpHead::score_heads(Tape& tape, const Var& pair_features, std::size_t n, std::size_t m) {
    return ops::reshape(ops::matmul(pair_features, tape.param(v_)), n, m);
}

std::vector<char> DpHead::self_mask(std::size_t n, std::size_t m) {
    std::vector<char> mask(n * m, 0);
    for (std::size_t i = 0; i < n && i < m; ++i) mask[i * m + i] = 1;
    return mask;
}

Var DpHead::head_log_probs(Tape& tape, const Var& pair_features, std::size_t n, std::size_t m) {
    return ops::log_softmax(score_heads(tape, pair_features, n, m), self_mask(n, m));
}

Var DpHead::label_log_probs(Tape& tape, const Var& pair_features, std::size_t m, std::span<const int> chosen_heads) {
    std::vector<int> rows(chosen_heads.size());
    for (std::size_t i = 0; i < chosen_heads.size(); ++i) {
        if (chosen_heads[i] < 0 || static_cast<std::size_t>(chosen_heads[i]) >= m) {
            throw DataError("head unit " + std::to_string(chosen_heads[i]) + " out of range");
        }
        rows[i] = static_cast<int>(i * m) + chosen_heads[i];
    }
    Var edges = ops::gather_rows(pair_features, rows);
    return ops::log_softmax(ops::matmul_nt(edges, tape.param(label_vectors_)));
}

Var DpHead::loss_sum(Tape& tape, const Var& units, std::span<const int> gold_head_units,
                     std::span<const int> gold_labels, bool train, Rng& dropout_rng) {
    const std::size_t m = units.rows();
    const std::size_t n = m - 1;
    if (gold_head_units.size() != n || gold_labels.size() != n) {
        throw DataError("gold tree covers " + std::to_string(gold_head_units.size()) + " tokens, sentence has " +
                        std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(gold_head_units[i]) == i) throw DataError("gold head is the token itself");
        if (gold_labels[i] < 0 || gold_labels[i] >= static_cast<int>(config_.labels.size())) {
            throw DataError("gold label index out of range");
        }
    }
    Var pf = pair_features(tape, units, train, dropout_rng);
    Var head_lp = ops::pick(head_log_probs(tape, pf, n, m), gold_head_units);
    Var label_lp = ops::pick(label_log_probs(tape, pf, m, gold_head_units), gold_labels);
    return ops::scale(ops::add(ops::sum(head_lp), ops::sum(label_lp)), -1.0);
}

namespace {

int argmax_row(const Tensor& t, std::size_t r, const std::vector<char>* mask) {
    const std::size_t cols = t.cols();
    int best = -1;
    for (std::size_t c = 0; c < cols; ++c) {
        if (mask && (*mask)[r * cols + c]) continue;
        if (best < 0 || t(r, c) > t(r, static_cast<std::size_t>(best))) best = static_cast<int>(c);
    }
    return best;
}

}  // namespace

DpPrediction DpHead::decode(const Var& units) {
    Tape tape;
    Var x = tape.constant(units.value());
    Rng unused(0);
    const std::size_t m = x.rows();
    const std::size_t n = m - 1;
    Var pf = pair_features(tape, x, false, unused);
    const auto mask = self_mask(n, m);
    const Tensor scores = score_heads(tape, pf, n, m).value();
    std::vector<int> head_units(n);
    for (std::size_t i = 0; i < n; ++i) head_units[i] = argmax_row(scores, i, &mask);
    const Tensor label_scores = label_log_probs(tape, pf, m, head_units).value();

    DpPrediction out;
    out.heads.resize(n);
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.heads[i] = unit_to_head(head_units[i], static_cast<int>(n));
        out.labels[i] = config_.labels[argmax_row(label_scores, i, nullptr)];
    }
    out.has_cycle = has_cycle(out.heads);
    return out;
}

std::vector<double> DpHead::root_probabilities(const Var& units) {
    Tape tape;
    Var x = tape.constant(units.value());
    Rng unused(0);
    const std::size_t m = x.rows();
    const std::size_t n = m - 1;
    const Tensor lp = head_log_probs(tape, pair_features(tape, x, false, unused), n, m).value();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(lp(i, n));
    return out;
}

int DpHead::label_index(const std::string& label) const {
    auto it = std::find(config_.labels.begin(), config_.labels.end(), label);
    return it == config_.labels.end() ? -1 : static_cast<int>(it - config_.labels.begin());
}

std::vector<Parameter*> DpHead::parameters() { return {&u_proj_, &w_proj_, &v_, &label_vectors_}; }

bool has_cycle(std::span<const int> conll_heads) {
    const int n = static_cast<int>(conll_heads.size());
    // 0 unvisited, 1 on the current path, 2 known to reach the root
    std::vector<int> state(n, 0);
    for (int start = 0; start < n; ++start) {
        std::vector<int> path;
        int cur = start;
        while (cur >= 0 && cur < n && state[cur] == 0) {
            state[cur] = 1;
            path.push_back(cur);
            cur = conll_heads[cur] - 1;
        }
        if (cur >= 0 && cur < n && state[cur] == 1) return true;
        for (int p : path) state[p] = 2;
    }
    return false;
}

}  // namespace mtparse::dp
