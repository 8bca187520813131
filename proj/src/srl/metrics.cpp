#include "mtparse/srl/metrics.hpp"

#include <cstdio>
#include <set>
#include <utility>

#include "mtparse/error.hpp"

namespace mtparse::srl {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_from_counts(long correct, long predicted, long gold) {
    return safe_ratio(2.0 * static_cast<double>(correct), static_cast<double>(predicted + gold));
}

namespace {

std::string frame_key(const FrameArguments& f) {
    return f.sentence_id + "@" + std::to_string(f.predicate.begin) + ":" + std::to_string(f.predicate.end);
}

}  // namespace

SrlReport evaluate_srl(std::span<const FrameArguments> predicted, std::span<const FrameArguments> gold,
                       tokenize::SrlSetting setting) {
    if (predicted.size() != gold.size()) {
        throw DataError("frame misalignment: " + std::to_string(predicted.size()) + " predicted vs " +
                        std::to_string(gold.size()) + " gold frames");
    }
    SrlReport r;
    r.setting = setting;
    for (std::size_t k = 0; k < gold.size(); ++k) {
        const auto& p = predicted[k];
        const auto& g = gold[k];
        if (frame_key(p) != frame_key(g)) {
            throw DataError("frame misalignment at " + std::to_string(k) + ": " + frame_key(p) + " vs " + frame_key(g));
        }
        std::set<std::pair<int, int>> gold_spans;
        std::map<std::pair<int, int>, std::string> gold_label;
        for (const auto& a : g.arguments) {
            gold_spans.insert({a.span.begin, a.span.end});
            gold_label[{a.span.begin, a.span.end}] = a.label;
            ++r.per_label[a.label].gold;
        }
        if (setting == tokenize::SrlSetting::kSpanGiven) {
            std::set<std::pair<int, int>> pred_spans;
            for (const auto& a : p.arguments) pred_spans.insert({a.span.begin, a.span.end});
            if (pred_spans != gold_spans || p.arguments.size() != g.arguments.size()) {
                throw DataError("frame " + frame_key(g) + ": span-given predictions must cover exactly the gold spans");
            }
        }
        for (const auto& a : p.arguments) {
            ++r.per_label[a.label].predicted;
            auto it = gold_label.find({a.span.begin, a.span.end});
            if (it == gold_label.end()) continue;
            ++r.identified;
            if (it->second == a.label) {
                ++r.correct;
                ++r.per_label[a.label].correct;
            }
        }
        r.gold += static_cast<long>(g.arguments.size());
        r.predicted += static_cast<long>(p.arguments.size());
    }

    r.micro_precision = safe_ratio(r.correct, r.predicted);
    r.micro_recall = safe_ratio(r.correct, r.gold);
    r.micro_f1 = f1_from_counts(r.correct, r.predicted, r.gold);
    r.identification_precision = safe_ratio(r.identified, r.predicted);
    r.identification_recall = safe_ratio(r.identified, r.gold);
    r.identification_f1 = f1_from_counts(r.identified, r.predicted, r.gold);
    r.accuracy = setting == tokenize::SrlSetting::kSpanGiven ? safe_ratio(r.correct, r.gold)
                                                             : safe_ratio(r.correct, r.identified);
    for (auto& [label, s] : r.per_label) {
        s.precision = safe_ratio(s.correct, s.predicted);
        s.recall = safe_ratio(s.correct, s.gold);
        s.f1 = f1_from_counts(s.correct, s.predicted, s.gold);
        r.macro_precision += s.precision;
        r.macro_recall += s.recall;
        r.macro_f1 += s.f1;
    }
    if (!r.per_label.empty()) {
        const double k = static_cast<double>(r.per_label.size());
        r.macro_precision /= k;
        r.macro_recall /= k;
        r.macro_f1 /= k;
    }
    return r;
}

void write_label_csv(std::ostream& out, const SrlReport& report) {
    out << "label,gold,predicted,correct,precision,recall,f1\n";
    char buf[128];
    for (const auto& [label, s] : report.per_label) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", s.precision, s.recall, s.f1);
        out << label << ',' << s.gold << ',' << s.predicted << ',' << s.correct << ',' << buf << '\n';
    }
}

}  // namespace mtparse::srl
