#include "mtparse/corpus/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "mtparse/error.hpp"

namespace mtparse::corpus {

namespace {

constexpr std::array<const char*, 10> kRoleNames = {"Agent", "Object", "Goal", "Location", "Time",
                                                    "Source", "Instrument", "Reason", "Manner", "Extent"};
constexpr std::array<const char*, 10> kRoleParticles = {"が", "を", "に", "で", "から", "へ", "と", "まで", "より", "は"};
constexpr std::array<const char*, 6> kRoleDeprels = {"nsubj", "obj", "iobj", "obl", "nmod", "advcl"};
constexpr std::array<const char*, 3> kAuxiliaries = {"た", "ます", "ない"};
constexpr std::array<const char*, 40> kSyllables = {
    "ア", "イ", "ウ", "エ", "オ", "カ", "キ", "ク", "ケ", "コ", "サ", "シ", "ス", "セ", "ソ", "タ", "チ", "ツ", "テ", "ト",
    "ナ", "ニ", "ヌ", "ネ", "ノ", "ハ", "ヒ", "フ", "ヘ", "ホ", "マ", "ミ", "ム", "メ", "モ", "ラ", "リ", "ル", "レ", "ロ"};

struct Lexicon {
    std::vector<std::string> role_particles;
    std::vector<std::string> auxiliaries{kAuxiliaries.begin(), kAuxiliaries.end()};
    std::vector<std::string> verbs, adverbs, suffixes, nouns;
};

Lexicon build_lexicon(const SynthConfig& cfg, std::mt19937_64& rng) {
    Lexicon lex;
    std::set<std::string> used{"の", "。"};
    used.insert(kAuxiliaries.begin(), kAuxiliaries.end());
    for (int r = 0; r < cfg.n_roles; ++r) {
        std::string p = r < static_cast<int>(kRoleParticles.size())
                             ? kRoleParticles[r]
                             : std::string("に") + kRoleParticles[r % kRoleParticles.size()] + std::to_string(r);
        used.insert(p);
        lex.role_particles.push_back(std::move(p));
    }
    const int remaining = cfg.vocab_size - static_cast<int>(used.size());
    const int n_verbs = std::max(2, remaining * 15 / 100);
    const int n_adverbs = std::max(1, remaining / 10);
    const int n_suffixes = std::max(1, remaining / 20);
    const int n_nouns = remaining - n_verbs - n_adverbs - n_suffixes;

    std::uniform_int_distribution<int> syl(0, static_cast<int>(kSyllables.size()) - 1);
    auto fresh = [&](int min_len, int max_len) {
        std::uniform_int_distribution<int> len(min_len, max_len);
        while (true) {
            std::string w;
            for (int k = len(rng); k > 0; --k) w += kSyllables[syl(rng)];
            if (used.insert(w).second) return w;
        }
    };
    for (int i = 0; i < n_verbs; ++i) lex.verbs.push_back(fresh(2, 3));
    for (int i = 0; i < n_adverbs; ++i) lex.adverbs.push_back(fresh(2, 3));
    for (int i = 0; i < n_suffixes; ++i) lex.suffixes.push_back(fresh(1, 1));
    for (int i = 0; i < n_nouns; ++i) lex.nouns.push_back(fresh(2, 3));
    return lex;
}

struct Builder {
    Sentence s;
    std::vector<int> heads;  // 0-based heads, -1 = root
    std::vector<std::string> labels;

    int push(std::string form, std::string label, int head) {
        s.suw.push_back(std::move(form));
        labels.push_back(std::move(label));
        heads.push_back(head);
        return static_cast<int>(s.suw.size()) - 1;
    }
    void close_luw(int begin) { s.luw_spans.push_back({begin, s.size()}); }
};

}  // namespace

void SynthConfig::validate() const {
    if (n_sentences < 0) throw ConfigError("n_sentences must be >= 0");
    if (n_roles < 1) throw ConfigError("n_roles must be >= 1");
    if (min_args < 1 || min_args > max_args || max_args > n_roles) {
        throw ConfigError("argument count range must satisfy 1 <= min_args <= max_args <= n_roles");
    }
    if (vocab_size < n_roles + 5 + 10) {
        throw ConfigError("vocab_size too small for " + std::to_string(n_roles) + " roles");
    }
}

std::vector<std::string> synthetic_roles(int n_roles) {
    std::vector<std::string> out;
    for (int r = 0; r < n_roles; ++r) {
        out.push_back(r < static_cast<int>(kRoleNames.size()) ? kRoleNames[r] : "Role" + std::to_string(r));
    }
    return out;
}

std::vector<Sentence> generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
    config.validate();
    std::mt19937_64 rng(seed);
    const Lexicon lex = build_lexicon(config, rng);
    const auto roles = synthetic_roles(config.n_roles);

    auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

    std::vector<Sentence> corpus;
    corpus.reserve(config.n_sentences);
    for (int n = 0; n < config.n_sentences; ++n) {
        const int k = std::uniform_int_distribution<int>(config.min_args, config.max_args)(rng);
        std::vector<int> role_ids(config.n_roles);
        for (int r = 0; r < config.n_roles; ++r) role_ids[r] = r;
        std::shuffle(role_ids.begin(), role_ids.end(), rng);
        role_ids.resize(k);

        Builder b;
        char id[32];
        std::snprintf(id, sizeof id, "%05d", n);
        b.s.id = config.id_prefix + id;

        // Head index -2 marks "attach to the verb", patched once the verb exists.
        constexpr int kVerb = -2;
        struct Phrase {
            int role;
            int luw_begin;
            int luw_end;
        };
        std::vector<Phrase> phrases;
        if (coin(0.3)) {
            b.close_luw(b.push(pick(lex.adverbs), "advmod", kVerb));
        }
        for (int role : role_ids) {
            const int luw_begin = b.s.luw_count();
            int modifier = -1;
            if (coin(0.3)) {
                modifier = b.push(pick(lex.nouns), "nmod", -3);
                b.close_luw(modifier);
                b.close_luw(b.push("の", "case", modifier));
            }
            const int noun = b.push(pick(lex.nouns), kRoleDeprels[role % kRoleDeprels.size()], kVerb);
            if (coin(0.3)) b.push(pick(lex.suffixes), "compound", noun);
            b.close_luw(noun);
            if (modifier >= 0) b.heads[modifier] = noun;
            b.close_luw(b.push(lex.role_particles[role], "case", noun));
            phrases.push_back({role, luw_begin, b.s.luw_count()});
        }
        const int pred_luw = b.s.luw_count();
        const int verb = b.push(pick(lex.verbs), "root", -1);
        if (coin(0.5)) b.push(pick(lex.auxiliaries), "aux", verb);
        b.close_luw(verb);
        b.close_luw(b.push("。", "punct", verb));

        std::vector<int> heads(b.heads.size());
        for (std::size_t i = 0; i < heads.size(); ++i) {
            const int h = b.heads[i] == kVerb ? verb : b.heads[i];
            heads[i] = h + 1;  // root (-1) becomes 0
        }
        PredicateFrame frame;
        frame.predicate = {pred_luw, pred_luw + 1};
        for (const auto& p : phrases) frame.arguments.push_back({roles[p.role], {p.luw_begin, p.luw_end}});

        b.s.heads = std::move(heads);
        b.s.dep_labels = std::move(b.labels);
        b.s.frames = std::vector<PredicateFrame>{std::move(frame)};
        corpus.push_back(std::move(b.s));
    }
    return corpus;
}

}  // namespace mtparse::corpus
