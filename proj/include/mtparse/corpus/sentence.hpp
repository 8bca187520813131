#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mtparse::corpus {

/// Half-open index range [begin, end).
struct Span {
    int begin = 0;
    int end = 0;

    int size() const noexcept { return end - begin; }
    bool overlaps(const Span& o) const noexcept { return begin < o.end && o.begin < end; }

    friend bool operator==(const Span&, const Span&) = default;
    friend auto operator<=>(const Span&, const Span&) = default;
};

struct Argument {
    std::string label;
    Span span;  // LUW indices

    friend bool operator==(const Argument&, const Argument&) = default;
};

struct PredicateFrame {
    Span predicate;  // LUW indices
    std::vector<Argument> arguments;

    friend bool operator==(const PredicateFrame&, const PredicateFrame&) = default;
};

/// A pre-segmented sentence. `suw` holds short-unit morphemes, `luw_spans`
/// groups them into long units. Heads follow the CoNLL-U convention:
/// 0 is the root, k in [1, n] is the k-th SUW.
struct Sentence {
    std::string id;
    std::vector<std::string> suw;
    std::vector<Span> luw_spans;
    std::optional<std::vector<int>> heads;
    std::optional<std::vector<std::string>> dep_labels;
    std::optional<std::vector<PredicateFrame>> frames;

    int size() const noexcept { return static_cast<int>(suw.size()); }
    int luw_count() const noexcept { return static_cast<int>(luw_spans.size()); }
    bool has_tree() const noexcept { return heads.has_value(); }

    /// SUW range covered by a LUW range.
    Span suw_range(const Span& luw) const;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// One LUW per SUW.
std::vector<Span> trivial_luw_spans(int n);

/// Throws ValidationError if the sentence breaks any structural invariant:
/// LUW partition, single-rooted acyclic tree, frame spans in range and
/// pairwise disjoint. When `roles` is non-empty every argument label must be
/// drawn from it.
void validate(const Sentence& s, const std::vector<std::string>& roles = {});

/// Index of the SUW attached to the root, or -1 when the sentence has no tree.
int root_token(const Sentence& s);

}  // namespace mtparse::corpus
