#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/tokenize/assemble.hpp"

namespace mtparse::srl {

/// Arguments of one (sentence, predicate) pair.
struct FrameArguments {
    std::string sentence_id;
    corpus::Span predicate;
    std::vector<corpus::Argument> arguments;
};

struct LabelScore {
    long gold = 0;
    long predicted = 0;
    long correct = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct SrlReport {
    tokenize::SrlSetting setting = tokenize::SrlSetting::kMorpheme;
    long gold = 0;
    long predicted = 0;
    long correct = 0;     // boundaries and label match
    long identified = 0;  // boundaries match
    double micro_precision = 0.0, micro_recall = 0.0, micro_f1 = 0.0;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double identification_precision = 0.0, identification_recall = 0.0, identification_f1 = 0.0;
    /// Morpheme: correct / identified. Span-given: correct / gold.
    double accuracy = 0.0;
    std::map<std::string, LabelScore> per_label;
};

/// Frames must pair up one-to-one by sentence id and predicate span. In the
/// span-given setting every prediction must carry exactly the gold spans.
SrlReport evaluate_srl(std::span<const FrameArguments> predicted, std::span<const FrameArguments> gold,
                       tokenize::SrlSetting setting);

/// label,gold,predicted,correct,precision,recall,f1 rows sorted by label.
void write_label_csv(std::ostream& out, const SrlReport& report);

/// ratio with 0 for an empty denominator.
double safe_ratio(double num, double den);
/// 2·correct / (predicted + gold), 0 when both are empty.
double f1_from_counts(long correct, long predicted, long gold);

}  // namespace mtparse::srl
