#include "mtparse/srl/bio.hpp"

#include <algorithm>

#include "mtparse/error.hpp"

namespace mtparse::srl {

std::vector<std::string> morpheme_tagset(const std::vector<std::string>& roles) {
    std::vector<std::string> tags{kOutside};
    for (const auto& r : roles) {
        tags.push_back("B-" + r);
        tags.push_back("I-" + r);
    }
    return tags;
}

std::vector<corpus::Argument> bio_decode(const std::vector<std::string>& tags) {
    std::vector<corpus::Argument> out;
    bool open = false;
    for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
        const std::string& t = tags[i];
        const bool tagged = t.size() > 2 && t[1] == '-' && (t[0] == 'B' || t[0] == 'I');
        if (!tagged) {
            open = false;
            continue;
        }
        const std::string label = t.substr(2);
        if (t[0] == 'I' && open && out.back().label == label) {
            out.back().span.end = i + 1;
            continue;
        }
        out.push_back({label, {i, i + 1}});
        open = true;
    }
    return out;
}

std::vector<std::string> encode_spans_as_tags(const std::vector<corpus::Argument>& spans, int n_units) {
    std::vector<std::string> tags(std::max(n_units, 0), kOutside);
    std::vector<char> used(tags.size(), 0);
    for (const auto& a : spans) {
        if (a.span.begin < 0 || a.span.end > n_units || a.span.size() <= 0) {
            throw DataError("span [" + std::to_string(a.span.begin) + ", " + std::to_string(a.span.end) +
                            ") outside " + std::to_string(n_units) + " units");
        }
        for (int i = a.span.begin; i < a.span.end; ++i) {
            if (used[i]) throw DataError("overlapping spans at unit " + std::to_string(i));
            used[i] = 1;
            tags[i] = (i == a.span.begin ? "B-" : "I-") + a.label;
        }
    }
    return tags;
}

}  // namespace mtparse::srl
