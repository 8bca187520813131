#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"

namespace mtparse::corpus {

// CoNLL-U. Only ID, FORM, HEAD and DEPREL are read; LUW grouping is carried
// in MISC as LUWBILabel=B|I (the UD Japanese convention). Multiword ranges
// and empty nodes are skipped. `# sent_id = ...` names the sentence.
// `validate_trees` = false accepts decoder output, whose heads may form cycles.
std::vector<Sentence> parse_conllu(std::istream& in, bool validate_trees = true);
std::vector<Sentence> read_conllu(const std::filesystem::path& path, bool validate_trees = true);
void write_conllu(std::ostream& out, const std::vector<Sentence>& corpus, const std::string& header_comment = {});
void write_conllu(const std::filesystem::path& path, const std::vector<Sentence>& corpus,
                  const std::string& header_comment = {});

// SRL JSONL: one object per line
//   {"sentence_id": str, "suw": [str], "luw_spans": [[b,e]],
//    "frames": [{"predicate": [b,e], "arguments": [{"label": str, "span": [b,e]}]}],
//    "dp": {"heads": [int], "labels": [str]}}        (dp optional)
// Unknown keys are ignored.
std::vector<Sentence> parse_srl_jsonl(std::istream& in, const std::vector<std::string>& roles = {});
std::vector<Sentence> read_srl_jsonl(const std::filesystem::path& path, const std::vector<std::string>& roles = {});
void write_srl_jsonl(std::ostream& out, const std::vector<Sentence>& corpus);
void write_srl_jsonl(const std::filesystem::path& path, const std::vector<Sentence>& corpus);

/// Picks the reader by extension: .conllu/.conll, otherwise JSONL.
std::vector<Sentence> read_any(const std::filesystem::path& path);

}  // namespace mtparse::corpus
