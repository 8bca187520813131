#include "mtparse/tokenize/subword.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mtparse/error.hpp"

namespace mtparse::tokenize {

namespace {

constexpr const char* kSpecialNames[kNumSpecial] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[ROOT]"};
constexpr std::string_view kMagic = "mtparse-subword 1";

bool is_special_name(std::string_view s) {
    return std::any_of(std::begin(kSpecialNames), std::end(kSpecialNames), [&](const char* n) { return s == n; });
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '\\') out += "\\\\";
        else if (c == '\t') out += "\\t";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            const char n = s[++i];
            out += n == 't' ? '\t' : n == 'n' ? '\n' : n;
        } else {
            out += s[i];
        }
    }
    return out;
}

// Merges every non-overlapping occurrence of (a, b), scanning left to right.
void apply_merge(std::vector<std::string>& symbols, const std::string& a, const std::string& b) {
    std::vector<std::string> out;
    out.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i + 1 < symbols.size() && symbols[i] == a && symbols[i + 1] == b) {
            out.push_back(a + b);
            ++i;
        } else {
            out.push_back(std::move(symbols[i]));
        }
    }
    symbols = std::move(out);
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        bool ok = i + len <= text.size();
        for (std::size_t k = 1; ok && k < len; ++k) ok = (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
        if (!ok) len = 1;
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

SubwordModel::SubwordModel(Mode mode, std::vector<std::string> base_symbols, std::vector<Merge> merges)
    : mode_(mode), merges_(std::move(merges)) {
    for (const char* name : kSpecialNames) add_token(name);
    std::sort(base_symbols.begin(), base_symbols.end());
    for (const auto& s : base_symbols) {
        if (is_special_name(s)) throw DataError("symbol '" + s + "' collides with a special token");
        add_token(s);
    }
    for (std::size_t r = 0; r < merges_.size(); ++r) {
        const auto& [a, b] = merges_[r];
        if (mode_ == Mode::kAtomic) throw DataError("atomic vocabularies carry no merge rules");
        if (is_special_name(a + b)) throw DataError("merge rule produces a special token");
        merge_rank_.emplace(merges_[r], static_cast<int>(r));
        add_token(a + b);
    }
}

void SubwordModel::add_token(const std::string& t) {
    if (ids_.emplace(t, static_cast<int>(tokens_.size())).second) tokens_.push_back(t);
}

int SubwordModel::id_of(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? -1 : it->second;
}

std::vector<int> SubwordModel::encode(std::string_view suw) const {
    if (mode_ == Mode::kAtomic) {
        if (suw.empty()) return {};
        const int id = id_of(suw);
        return {id < kNumSpecial ? kUnk : id};
    }
    // Unknown characters become [UNK] and never take part in merges.
    std::vector<std::string> symbols = utf8_chars(suw);
    std::vector<char> unknown(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int id = id_of(symbols[i]);
        unknown[i] = id < kNumSpecial;
    }
    while (symbols.size() > 1) {
        int best_rank = -1;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            if (unknown[i] || unknown[i + 1]) continue;
            auto it = merge_rank_.find({symbols[i], symbols[i + 1]});
            if (it != merge_rank_.end() && (best_rank < 0 || it->second < best_rank)) {
                best_rank = it->second;
            }
        }
        if (best_rank < 0) break;
        const auto& [a, b] = merges_[best_rank];
        std::vector<std::string> out;
        std::vector<char> out_unknown;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (i + 1 < symbols.size() && !unknown[i] && !unknown[i + 1] && symbols[i] == a && symbols[i + 1] == b) {
                out.push_back(a + b);
                out_unknown.push_back(0);
                ++i;
            } else {
                out.push_back(std::move(symbols[i]));
                out_unknown.push_back(unknown[i]);
            }
        }
        symbols = std::move(out);
        unknown = std::move(out_unknown);
    }
    std::vector<int> ids;
    ids.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) ids.push_back(unknown[i] ? kUnk : id_of(symbols[i]));
    return ids;
}

std::string SubwordModel::decode(std::span<const int> ids) const {
    std::string out;
    for (int id : ids) out += token(id);
    return out;
}

void SubwordModel::save(std::ostream& out) const {
    out << kMagic << "\n";
    out << "mode " << (mode_ == Mode::kBpe ? "bpe" : "atomic") << "\n";
    out << "merges " << merges_.size() << "\n";
    for (const auto& [a, b] : merges_) out << escape(a) << '\t' << escape(b) << "\n";
    // Base symbols: every token that is neither special nor a merge product.
    std::set<std::string> merged;
    for (const auto& [a, b] : merges_) merged.insert(a + b);
    std::vector<std::string> base;
    for (int id = kNumSpecial; id < vocab_size(); ++id) {
        if (!merged.count(tokens_[id])) base.push_back(tokens_[id]);
    }
    out << "tokens " << tokens_.size() << " base " << base.size() << "\n";
    for (const auto& t : tokens_) out << escape(t) << "\n";
}

void SubwordModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    save(out);
}

SubwordModel SubwordModel::load(std::istream& in) {
    std::string line;
    auto next = [&]() -> std::string& {
        if (!std::getline(in, line)) throw DataError("truncated subword model");
        return line;
    };
    if (next() != kMagic) throw DataError("not a subword model file");
    std::istringstream mode_line(next());
    std::string key, mode_name;
    mode_line >> key >> mode_name;
    if (key != "mode" || (mode_name != "bpe" && mode_name != "atomic")) throw DataError("bad subword mode line");
    const Mode mode = mode_name == "bpe" ? Mode::kBpe : Mode::kAtomic;

    std::size_t n_merges = 0;
    std::istringstream(next()) >> key >> n_merges;
    if (key != "merges") throw DataError("bad merges header");
    std::vector<Merge> merges;
    for (std::size_t i = 0; i < n_merges; ++i) {
        const std::string& l = next();
        const auto tab = l.find('\t');
        if (tab == std::string::npos) throw DataError("bad merge rule line");
        merges.emplace_back(unescape(l.substr(0, tab)), unescape(l.substr(tab + 1)));
    }
    std::size_t n_tokens = 0, n_base = 0;
    std::string base_key;
    std::istringstream(next()) >> key >> n_tokens >> base_key >> n_base;
    if (key != "tokens" || base_key != "base") throw DataError("bad token table header");
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n_tokens; ++i) tokens.push_back(unescape(next()));
    if (n_tokens < kNumSpecial + n_base) throw DataError("token table too short");
    std::vector<std::string> base(tokens.begin() + kNumSpecial, tokens.begin() + kNumSpecial + n_base);
    SubwordModel model(mode, std::move(base), std::move(merges));
    if (model.tokens_ != tokens) throw DataError("token table inconsistent with merge rules");
    return model;
}

SubwordModel SubwordModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return load(in);
}

std::string SubwordModel::serialize() const {
    std::ostringstream out;
    save(out);
    return out.str();
}

SubwordModel SubwordModel::deserialize(const std::string& text) {
    std::istringstream in(text);
    return load(in);
}

SubwordModel learn_subwords(const std::vector<corpus::Sentence>& corpus, int n_merges) {
    if (n_merges < 0) throw ConfigError("n_merges must be >= 0");
    std::map<std::string, long> word_freq;
    for (const auto& s : corpus) {
        for (const auto& w : s.suw) {
            if (!w.empty()) ++word_freq[w];
        }
    }
    if (word_freq.empty()) throw DataError("cannot learn subwords from an empty corpus");

    std::vector<std::pair<std::vector<std::string>, long>> words;
    std::set<std::string> chars;
    for (const auto& [w, f] : word_freq) {
        auto sym = utf8_chars(w);
        chars.insert(sym.begin(), sym.end());
        words.emplace_back(std::move(sym), f);
    }

    std::vector<SubwordModel::Merge> merges;
    for (int round = 0; round < n_merges; ++round) {
        std::map<SubwordModel::Merge, long> pair_freq;
        for (const auto& [sym, f] : words) {
            for (std::size_t i = 0; i + 1 < sym.size(); ++i) pair_freq[{sym[i], sym[i + 1]}] += f;
        }
        const SubwordModel::Merge* best = nullptr;
        long best_freq = 0;
        std::string best_str;
        for (const auto& [pair, f] : pair_freq) {
            std::string merged = pair.first + pair.second;
            if (is_special_name(merged)) continue;
            // std::map order makes the left piece the final tie-break.
            if (f > best_freq || (f == best_freq && merged < best_str)) {
                best = &pair;
                best_freq = f;
                best_str = std::move(merged);
            }
        }
        if (!best) break;
        merges.push_back(*best);
        for (auto& [sym, f] : words) apply_merge(sym, best->first, best->second);
    }
    return SubwordModel(SubwordModel::Mode::kBpe, {chars.begin(), chars.end()}, std::move(merges));
}

SubwordModel learn_atomic_vocabulary(const std::vector<corpus::Sentence>& corpus) {
    std::set<std::string> surfaces;
    for (const auto& s : corpus) {
        for (const auto& w : s.suw) {
            if (!w.empty() && !is_special_name(w)) surfaces.insert(w);
        }
    }
    if (surfaces.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
    return SubwordModel(SubwordModel::Mode::kAtomic, {surfaces.begin(), surfaces.end()}, {});
}

}  // namespace mtparse::tokenize
