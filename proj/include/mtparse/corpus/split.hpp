#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"

namespace mtparse::corpus {

enum class SplitName { kTrain = 0, kDev = 1, kTest = 2 };

const char* to_string(SplitName s);
SplitName parse_split_name(const std::string& s);

struct SplitSpec {
    std::array<double, 3> ratios{0.8, 0.1, 0.1};
    /// Pre-assigned sentences (e.g. an official treebank split). Applies to
    /// the DP corpus; SRL sentences inherit through shared ids.
    std::map<std::string, SplitName> shared_sentence_map;

    /// Parses "80:10:10" (any positive scale) into normalized ratios.
    static std::array<double, 3> parse_ratios(const std::string& text);
};

struct Splits {
    std::array<std::vector<Sentence>, 3> parts;

    const std::vector<Sentence>& operator[](SplitName s) const { return parts[static_cast<int>(s)]; }
    std::vector<Sentence>& operator[](SplitName s) { return parts[static_cast<int>(s)]; }
};

/// Largest-remainder apportionment of `total` items by `ratios`.
std::array<int, 3> apportion(int total, const std::array<double, 3>& ratios);

/// Splits both corpora so that a sentence id present in both lands in the
/// same split on each side. DP sentences absent from the shared map are
/// shuffled and apportioned by ratio; SRL sentences not shared with the DP
/// corpus fill each split up to its ratio target. Order within a split
/// follows the input order. Throws ConfigError if ratios do not sum to 1.
std::pair<Splits, Splits> split_leak_safe(const std::vector<Sentence>& dp_corpus,
                                          const std::vector<Sentence>& srl_corpus, const SplitSpec& spec,
                                          std::uint64_t seed);

/// Writes <stem>.train, <stem>.dev, <stem>.test using the format implied by `stem`.
void write_splits(const std::filesystem::path& stem, const Splits& splits);

}  // namespace mtparse::corpus
