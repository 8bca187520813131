#include "mtparse/dp/metrics.hpp"

#include "mtparse/error.hpp"

namespace mtparse::dp {

DpMetrics evaluate_dp(std::span<const DpPrediction> predictions, std::span<const corpus::Sentence> gold) {
    if (predictions.size() != gold.size()) {
        throw DataError(std::to_string(predictions.size()) + " predictions for " + std::to_string(gold.size()) +
                        " gold sentences");
    }
    DpMetrics m;
    long head_hits = 0, label_hits = 0, root_hits = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        const auto& g = gold[s];
        const auto& p = predictions[s];
        if (!g.heads || !g.dep_labels) throw DataError("sentence " + g.id + " has no gold tree");
        const std::size_t n = g.heads->size();
        if (p.heads.size() != n || p.labels.size() != n) {
            throw DataError("sentence " + g.id + ": prediction length differs from gold");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (p.heads[i] != (*g.heads)[i]) continue;
            ++head_hits;
            if (p.labels[i] == (*g.dep_labels)[i]) ++label_hits;
        }
        const int r = corpus::root_token(g);
        if (r >= 0 && p.heads[r] == 0) ++root_hits;
        if (has_cycle(p.heads)) ++m.cycles;
        m.tokens += static_cast<long>(n);
    }
    m.sentences = static_cast<long>(gold.size());
    if (m.tokens > 0) {
        m.uas = static_cast<double>(head_hits) / static_cast<double>(m.tokens);
        m.las = static_cast<double>(label_hits) / static_cast<double>(m.tokens);
    }
    if (m.sentences > 0) m.root = static_cast<double>(root_hits) / static_cast<double>(m.sentences);
    return m;
}

}  // namespace mtparse::dp
