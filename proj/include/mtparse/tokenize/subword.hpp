#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtparse/corpus/sentence.hpp"

namespace mtparse::tokenize {

/// Fixed ids of the special tokens; merges never produce them.
enum SpecialToken : int { kPad = 0, kUnk = 1, kCls = 2, kSep = 3, kRoot = 4, kNumSpecial = 5 };

/// Splits UTF-8 text into code points. Invalid bytes become one-byte pieces.
std::vector<std::string> utf8_chars(std::string_view text);

/// Subword vocabulary over SUW surfaces. In BPE mode a surface is split into
/// characters and merged by rule rank; in atomic mode every training surface
/// is one token. Immutable after construction.
class SubwordModel {
  public:
    enum class Mode { kBpe, kAtomic };
    using Merge = std::pair<std::string, std::string>;

    SubwordModel() = default;
    SubwordModel(Mode mode, std::vector<std::string> base_symbols, std::vector<Merge> merges);

    Mode mode() const noexcept { return mode_; }
    int vocab_size() const noexcept { return static_cast<int>(tokens_.size()); }
    const std::vector<Merge>& merges() const noexcept { return merges_; }
    const std::string& token(int id) const { return tokens_.at(id); }
    /// -1 when absent.
    int id_of(std::string_view token) const;

    /// Token ids for one SUW surface; never empty for non-empty input.
    std::vector<int> encode(std::string_view suw) const;
    std::string decode(std::span<const int> ids) const;

    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static SubwordModel load(std::istream& in);
    static SubwordModel load(const std::filesystem::path& path);
    std::string serialize() const;
    static SubwordModel deserialize(const std::string& text);

    friend bool operator==(const SubwordModel& a, const SubwordModel& b) {
        return a.mode_ == b.mode_ && a.merges_ == b.merges_ && a.tokens_ == b.tokens_;
    }

  private:
    void add_token(const std::string& t);

    Mode mode_ = Mode::kBpe;
    std::vector<Merge> merges_;
    std::map<Merge, int> merge_rank_;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

/// Greedy BPE within SUW boundaries. Each round merges the most frequent
/// adjacent pair; ties go to the lexicographically smallest merged string,
/// then the smallest left piece. Stops early when no pair is left.
SubwordModel learn_subwords(const std::vector<corpus::Sentence>& corpus, int n_merges);

/// Whole-SUW vocabulary (no subword splitting).
SubwordModel learn_atomic_vocabulary(const std::vector<corpus::Sentence>& corpus);

}  // namespace mtparse::tokenize
