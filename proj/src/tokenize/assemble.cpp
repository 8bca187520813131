#include "mtparse/tokenize/assemble.hpp"

#include "mtparse/error.hpp"
#include "mtparse/numerics/ops.hpp"

namespace mtparse::tokenize {

const char* to_string(DpMode m) { return m == DpMode::kRootKnown ? "root_known" : "root_unknown"; }
const char* to_string(SrlSetting s) { return s == SrlSetting::kSpanGiven ? "span_given" : "morpheme"; }

DpMode parse_dp_mode(const std::string& s) {
    if (s == "root_unknown") return DpMode::kRootUnknown;
    if (s == "root_known") return DpMode::kRootKnown;
    throw ConfigError("unknown DP mode '" + s + "' (expected root_unknown or root_known)");
}

SrlSetting parse_srl_setting(const std::string& s) {
    if (s == "morpheme") return SrlSetting::kMorpheme;
    if (s == "span_given") return SrlSetting::kSpanGiven;
    throw ConfigError("unknown SRL setting '" + s + "' (expected morpheme or span_given)");
}

namespace {

class Builder {
  public:
    explicit Builder(const SubwordModel& model) : model_(model) {}

    void special(int id, int segment) {
        in_.token_ids.push_back(id);
        in_.segment_ids.push_back(segment);
        in_.predicate_indicator.push_back(0);
    }

    // Appends the subwords of one SUW; returns their positions.
    std::vector<int> word(const std::string& surface, int segment, int indicator) {
        std::vector<int> pos;
        auto ids = model_.encode(surface);
        if (ids.empty()) ids.push_back(kUnk);
        for (int id : ids) {
            pos.push_back(in_.length());
            in_.token_ids.push_back(id);
            in_.segment_ids.push_back(segment);
            in_.predicate_indicator.push_back(indicator);
        }
        return pos;
    }

    void sentence(const corpus::Sentence& s, const std::vector<char>& predicate_suw) {
        for (int i = 0; i < s.size(); ++i) {
            in_.suw_positions.push_back(word(s.suw[i], 0, predicate_suw.empty() ? 0 : predicate_suw[i]));
        }
    }

    AssembledInput finish(int max_tokens, const std::string& id) {
        if (in_.length() > max_tokens) {
            throw LengthError("sentence " + id + ": " + std::to_string(in_.length()) + " tokens exceed the limit of " +
                              std::to_string(max_tokens));
        }
        return std::move(in_);
    }

    AssembledInput& input() { return in_; }

  private:
    const SubwordModel& model_;
    AssembledInput in_;
};

std::vector<int> pool(const UnitMap& suw_positions, const corpus::Span& suw_range) {
    std::vector<int> out;
    for (int i = suw_range.begin; i < suw_range.end; ++i) {
        out.insert(out.end(), suw_positions[i].begin(), suw_positions[i].end());
    }
    return out;
}

}  // namespace

AssembledInput assemble_dp(const corpus::Sentence& sentence, DpMode mode, std::optional<int> root_token,
                           const SubwordModel& model, int max_tokens) {
    if (mode == DpMode::kRootKnown) {
        if (!root_token) throw ConfigError("sentence " + sentence.id + ": root_known input needs a root token");
        if (*root_token < 0 || *root_token >= sentence.size()) {
            throw DataError("sentence " + sentence.id + ": root token " + std::to_string(*root_token) +
                            " out of range");
        }
    }
    Builder b(model);
    b.special(kCls, 0);
    b.sentence(sentence, {});
    b.special(kSep, 0);
    if (mode == DpMode::kRootKnown) {
        b.word(sentence.suw[*root_token], 1, 0);
        b.special(kSep, 1);
    }
    auto& in = b.input();
    in.root_position = in.length();
    b.special(kRoot, 1);

    in.unit_map = in.suw_positions;
    in.unit_map.push_back({in.root_position});
    for (int u = 0; u < static_cast<int>(in.unit_map.size()); ++u) in.candidate_positions.push_back(u);
    return b.finish(max_tokens, sentence.id);
}

AssembledInput assemble_srl(const corpus::Sentence& sentence, const corpus::PredicateFrame& frame,
                            SrlSetting setting, const SubwordModel& model, int max_tokens, bool predicate_segment) {
    const corpus::Span pred_suw = sentence.suw_range(frame.predicate);
    std::vector<char> is_pred(sentence.size(), 0);
    for (int i = pred_suw.begin; i < pred_suw.end; ++i) is_pred[i] = 1;

    Builder b(model);
    b.special(kCls, 0);
    b.sentence(sentence, is_pred);
    b.special(kSep, 0);
    if (predicate_segment) {
        for (int i = pred_suw.begin; i < pred_suw.end; ++i) b.word(sentence.suw[i], 1, 1);
        b.special(kSep, 1);
    }
    auto& in = b.input();

    if (setting == SrlSetting::kMorpheme) {
        for (const auto& luw : sentence.luw_spans) in.unit_map.push_back(pool(in.suw_positions, luw));
        for (int u = frame.predicate.begin; u < frame.predicate.end; ++u) in.predicate_units.push_back(u);
        for (int u = 0; u < sentence.luw_count(); ++u) in.target_units.push_back(u);
    } else {
        for (const auto& arg : frame.arguments) {
            in.unit_map.push_back(pool(in.suw_positions, sentence.suw_range(arg.span)));
        }
        for (int u = 0; u < static_cast<int>(frame.arguments.size()); ++u) in.target_units.push_back(u);
        in.predicate_units.push_back(static_cast<int>(in.unit_map.size()));
        in.unit_map.push_back(pool(in.suw_positions, pred_suw));
    }
    return b.finish(max_tokens, sentence.id);
}

numerics::Var average_units(const numerics::Var& hidden, const UnitMap& unit_map) {
    return numerics::mean_over_sets(hidden, unit_map);
}

numerics::Tensor average_units(const numerics::Tensor& hidden, const UnitMap& unit_map) {
    numerics::Tape tape;
    return average_units(tape.constant(hidden), unit_map).value();
}

}  // namespace mtparse::tokenize
