#pragma once

#include <string>
#include <vector>

#include "mtparse/corpus/sentence.hpp"

namespace mtparse::srl {

inline constexpr const char* kOutside = "O";

/// "O", then B-l and I-l for each role in order.
std::vector<std::string> morpheme_tagset(const std::vector<std::string>& roles);

/// Maximal runs B-l (I-l)* become spans over unit indices. An I-l that does
/// not continue a span of label l opens a new one. Anything that is not
/// B-x or I-x counts as O.
std::vector<corpus::Argument> bio_decode(const std::vector<std::string>& tags);

/// Inverse of bio_decode for non-overlapping spans inside [0, n_units).
/// Throws DataError on overlap or out-of-range spans.
std::vector<std::string> encode_spans_as_tags(const std::vector<corpus::Argument>& spans, int n_units);

}  // namespace mtparse::srl
