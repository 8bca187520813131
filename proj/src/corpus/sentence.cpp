#include "mtparse/corpus/sentence.hpp"

#include <algorithm>

#include "mtparse/error.hpp"

namespace mtparse::corpus {

Span Sentence::suw_range(const Span& luw) const {
    if (luw.begin < 0 || luw.end > luw_count() || luw.begin >= luw.end) {
        throw ValidationError("sentence " + id + ": LUW range [" + std::to_string(luw.begin) + "," +
                              std::to_string(luw.end) + ") out of bounds");
    }
    return {luw_spans[luw.begin].begin, luw_spans[luw.end - 1].end};
}

std::vector<Span> trivial_luw_spans(int n) {
    std::vector<Span> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back({i, i + 1});
    return out;
}

namespace {

void validate_partition(const Sentence& s) {
    int cursor = 0;
    for (const auto& sp : s.luw_spans) {
        if (sp.begin != cursor || sp.end <= sp.begin) {
            throw ValidationError("sentence " + s.id + ": luw_spans do not partition the SUW sequence");
        }
        cursor = sp.end;
    }
    if (cursor != s.size()) {
        throw ValidationError("sentence " + s.id + ": luw_spans do not partition the SUW sequence");
    }
}

void validate_tree(const Sentence& s) {
    const auto& heads = *s.heads;
    const int n = s.size();
    if (static_cast<int>(heads.size()) != n) {
        throw ValidationError("sentence " + s.id + ": head count differs from token count");
    }
    if (!s.dep_labels || static_cast<int>(s.dep_labels->size()) != n) {
        throw ValidationError("sentence " + s.id + ": dependency label count differs from token count");
    }
    int roots = 0;
    for (int i = 0; i < n; ++i) {
        const int h = heads[i];
        if (h < 0 || h > n) {
            throw ValidationError("sentence " + s.id + ": head " + std::to_string(h) + " of token " +
                                  std::to_string(i + 1) + " out of range");
        }
        if (h == i + 1) {
            throw ValidationError("sentence " + s.id + ": token " + std::to_string(i + 1) + " heads itself");
        }
        if (h == 0) ++roots;
    }
    if (roots != 1) {
        throw ValidationError("sentence " + s.id + ": expected exactly one root, found " + std::to_string(roots));
    }
    // Every token must reach the root; states: 0 unvisited, 1 on path, 2 done.
    std::vector<char> state(n, 0);
    for (int start = 0; start < n; ++start) {
        std::vector<int> path;
        int cur = start;
        while (cur >= 0 && state[cur] == 0) {
            state[cur] = 1;
            path.push_back(cur);
            cur = heads[cur] - 1;
        }
        if (cur >= 0 && state[cur] == 1) {
            throw ValidationError("sentence " + s.id + ": dependency cycle through token " + std::to_string(cur + 1));
        }
        for (int p : path) state[p] = 2;
    }
}

void validate_frames(const Sentence& s, const std::vector<std::string>& roles) {
    const int m = s.luw_count();
    auto in_range = [m](const Span& sp) { return sp.begin >= 0 && sp.end <= m && sp.begin < sp.end; };
    for (std::size_t f = 0; f < s.frames->size(); ++f) {
        const auto& frame = (*s.frames)[f];
        const std::string where = "sentence " + s.id + ", frame " + std::to_string(f);
        if (!in_range(frame.predicate)) throw ValidationError(where + ": predicate span out of range");
        std::vector<Span> taken{frame.predicate};
        for (const auto& arg : frame.arguments) {
            if (!in_range(arg.span)) throw ValidationError(where + ": argument span out of range");
            if (!roles.empty() && std::find(roles.begin(), roles.end(), arg.label) == roles.end()) {
                throw ValidationError(where + ": role '" + arg.label + "' not in the role inventory");
            }
            for (const auto& t : taken) {
                if (t.overlaps(arg.span)) throw ValidationError(where + ": overlapping argument spans");
            }
            taken.push_back(arg.span);
        }
    }
}

}  // namespace

void validate(const Sentence& s, const std::vector<std::string>& roles) {
    validate_partition(s);
    if (s.heads) validate_tree(s);
    if (s.frames) validate_frames(s, roles);
}

int root_token(const Sentence& s) {
    if (!s.heads) return -1;
    const auto& h = *s.heads;
    auto it = std::find(h.begin(), h.end(), 0);
    return it == h.end() ? -1 : static_cast<int>(it - h.begin());
}

}  // namespace mtparse::corpus
