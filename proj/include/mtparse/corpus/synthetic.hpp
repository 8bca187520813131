#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"

namespace mtparse::corpus {

struct SynthConfig {
    int n_sentences = 50;
    int vocab_size = 200;  // distinct SUW surfaces
    int n_roles = 5;
    int min_args = 1;  // argument phrases per sentence
    int max_args = 3;
    std::string id_prefix = "syn";

    void validate() const;
};

/// Role inventory used by the generator for `n_roles` roles.
std::vector<std::string> synthetic_roles(int n_roles);

/// Template grammar: [adverb] phrase... verb [aux] punct, where each phrase is
/// [modifier の] noun [suffix] particle. The particle and the noun→verb
/// dependency label are both fixed by the phrase's role, so every argument
/// corresponds to one labeled edge into the predicate. Compound nouns and
/// verb+aux form multi-SUW LUWs. Every sentence carries one frame.
std::vector<Sentence> generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace mtparse::corpus
