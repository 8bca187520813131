#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"
#include "mtparse/numerics/tape.hpp"
#include "mtparse/tokenize/subword.hpp"

namespace mtparse::tokenize {

enum class DpMode { kRootUnknown, kRootKnown };
enum class SrlSetting { kMorpheme, kSpanGiven };

const char* to_string(DpMode m);
const char* to_string(SrlSetting s);
DpMode parse_dp_mode(const std::string& s);
SrlSetting parse_srl_setting(const std::string& s);

inline constexpr int kDefaultMaxTokens = 320;

using UnitMap = std::vector<std::vector<int>>;

/// Encoder input for one task instance plus the maps that pool subword
/// vectors back to task units.
struct AssembledInput {
    std::vector<int> token_ids;
    std::vector<int> segment_ids;  // 0 = sentence, 1 = appended segment
    /// Subword positions of each SUW inside the sentence segment.
    UnitMap suw_positions;
    /// Averaging set per output unit. DP: one unit per SUW, then [ROOT].
    /// SRL morpheme: one per LUW. SRL span-given: one per argument, then the predicate.
    UnitMap unit_map;
    std::vector<int> predicate_indicator;  // 0/1 per position
    int root_position = -1;                // DP only
    /// DP: unit indices a dependent may attach to (every SUW unit and [ROOT]).
    std::vector<int> candidate_positions;
    /// SRL: units pooled into the predicate vector.
    std::vector<int> predicate_units;
    /// SRL: units that receive a label.
    std::vector<int> target_units;

    int length() const noexcept { return static_cast<int>(token_ids.size()); }
    int root_unit() const noexcept { return static_cast<int>(unit_map.size()) - 1; }
};

/// root_unknown: [CLS] w_1..w_n [SEP] [ROOT]
/// root_known:   [CLS] w_1..w_n [SEP] w_root [SEP] [ROOT]
/// `root_token` is a 0-based SUW index, required in root_known mode.
AssembledInput assemble_dp(const corpus::Sentence& sentence, DpMode mode, std::optional<int> root_token,
                           const SubwordModel& model, int max_tokens = kDefaultMaxTokens);

/// [CLS] w_1..w_n [SEP] w_p [SEP], or [CLS] w_1..w_n [SEP] when
/// `predicate_segment` is false. The indicator marks the predicate's
/// subwords in the sentence and in the appended copy.
AssembledInput assemble_srl(const corpus::Sentence& sentence, const corpus::PredicateFrame& frame,
                            SrlSetting setting, const SubwordModel& model, int max_tokens = kDefaultMaxTokens,
                            bool predicate_segment = true);

/// Row u of the result is the arithmetic mean of `hidden` rows in unit_map[u].
numerics::Var average_units(const numerics::Var& hidden, const UnitMap& unit_map);
numerics::Tensor average_units(const numerics::Tensor& hidden, const UnitMap& unit_map);

}  // namespace mtparse::tokenize
