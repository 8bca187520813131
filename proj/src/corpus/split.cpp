#include "mtparse/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mtparse/corpus/io.hpp"
#include "mtparse/error.hpp"

namespace mtparse::corpus {

const char* to_string(SplitName s) {
    switch (s) {
        case SplitName::kTrain: return "train";
        case SplitName::kDev: return "dev";
        case SplitName::kTest: return "test";
    }
    return "?";
}

SplitName parse_split_name(const std::string& s) {
    if (s == "train") return SplitName::kTrain;
    if (s == "dev" || s == "valid" || s == "validation") return SplitName::kDev;
    if (s == "test") return SplitName::kTest;
    throw ConfigError("unknown split name '" + s + "'");
}

std::array<double, 3> SplitSpec::parse_ratios(const std::string& text) {
    std::array<double, 3> r{};
    std::istringstream in(text);
    std::string part;
    int k = 0;
    while (std::getline(in, part, ':')) {
        if (k == 3) throw ConfigError("ratios need exactly three parts: " + text);
        try {
            r[k++] = std::stod(part);
        } catch (const std::exception&) {
            throw ConfigError("bad ratio '" + part + "'");
        }
    }
    if (k != 3) throw ConfigError("ratios need exactly three parts: " + text);
    const double total = r[0] + r[1] + r[2];
    if (!(total > 0) || r[0] < 0 || r[1] < 0 || r[2] < 0) throw ConfigError("ratios must be non-negative: " + text);
    for (auto& x : r) x /= total;
    return r;
}

std::array<int, 3> apportion(int total, const std::array<double, 3>& weights) {
    const double wsum = weights[0] + weights[1] + weights[2];
    std::array<int, 3> out{};
    if (total <= 0 || wsum <= 0) return out;
    std::array<double, 3> rem{};
    int assigned = 0;
    for (int k = 0; k < 3; ++k) {
        const double exact = total * weights[k] / wsum;
        out[k] = static_cast<int>(std::floor(exact + 1e-9));
        rem[k] = exact - out[k];
        assigned += out[k];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (int i = 0; assigned < total; i = (i + 1) % 3, ++assigned) ++out[order[i]];
    return out;
}

namespace {

void check_ratios(const std::array<double, 3>& r) {
    const double total = r[0] + r[1] + r[2];
    if (std::abs(total - 1.0) > 1e-9 || r[0] < 0 || r[1] < 0 || r[2] < 0) {
        throw ConfigError("split ratios must be non-negative and sum to 1");
    }
}

void check_unique_ids(const std::vector<Sentence>& corpus, const char* which) {
    std::set<std::string> seen;
    for (const auto& s : corpus) {
        if (!seen.insert(s.id).second) throw DataError(std::string(which) + " corpus repeats sentence id " + s.id);
    }
}

// Per-sentence split assignment: forced entries keep their split, the rest
// are shuffled and fill whatever each split still lacks.
std::vector<SplitName> assign(const std::vector<Sentence>& corpus, const std::map<std::string, SplitName>& forced,
                              const std::array<double, 3>& ratios, std::mt19937_64& rng) {
    const int n = static_cast<int>(corpus.size());
    std::vector<SplitName> out(n, SplitName::kTrain);
    std::array<int, 3> forced_count{};
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
        auto it = forced.find(corpus[i].id);
        if (it != forced.end()) {
            out[i] = it->second;
            ++forced_count[static_cast<int>(it->second)];
        } else {
            free.push_back(i);
        }
    }
    const auto target = apportion(n, ratios);
    std::array<double, 3> deficit{};
    for (int k = 0; k < 3; ++k) deficit[k] = std::max(0, target[k] - forced_count[k]);
    const auto fill = apportion(static_cast<int>(free.size()), deficit);

    std::shuffle(free.begin(), free.end(), rng);
    std::size_t cursor = 0;
    for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < fill[k]; ++c) out[free[cursor++]] = static_cast<SplitName>(k);
    }
    return out;
}

Splits gather(const std::vector<Sentence>& corpus, const std::vector<SplitName>& where) {
    Splits s;
    for (std::size_t i = 0; i < corpus.size(); ++i) s[where[i]].push_back(corpus[i]);
    return s;
}

}  // namespace

std::pair<Splits, Splits> split_leak_safe(const std::vector<Sentence>& dp_corpus,
                                          const std::vector<Sentence>& srl_corpus, const SplitSpec& spec,
                                          std::uint64_t seed) {
    check_ratios(spec.ratios);
    check_unique_ids(dp_corpus, "DP");
    check_unique_ids(srl_corpus, "SRL");
    std::mt19937_64 rng(seed);

    const auto dp_where = assign(dp_corpus, spec.shared_sentence_map, spec.ratios, rng);
    std::map<std::string, SplitName> inherited = spec.shared_sentence_map;
    for (std::size_t i = 0; i < dp_corpus.size(); ++i) inherited[dp_corpus[i].id] = dp_where[i];
    const auto srl_where = assign(srl_corpus, inherited, spec.ratios, rng);

    return {gather(dp_corpus, dp_where), gather(srl_corpus, srl_where)};
}

void write_splits(const std::filesystem::path& stem, const Splits& splits) {
    const auto name = stem.filename().string();
    const bool conllu = name.find(".conll") != std::string::npos;
    for (int k = 0; k < 3; ++k) {
        std::filesystem::path p = stem;
        p += std::string(".") + to_string(static_cast<SplitName>(k));
        if (conllu) {
            write_conllu(p, splits.parts[k]);
        } else {
            write_srl_jsonl(p, splits.parts[k]);
        }
    }
}

}  // namespace mtparse::corpus
