#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cxrkg {

using Tokens = std::vector<std::string>;

// ASCII lowercase; bytes >= 0x80 are passed through untouched.
std::string to_lower(std::string_view s);

// Lowercase, then split on whitespace and punctuation. A '-' survives only
// when it sits between two word characters ("broncho-vascular").
Tokens tokenize(std::string_view s);

std::string join(const Tokens& tokens, std::string_view sep = " ");

// Trim and collapse internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

// Byte range of one sentence inside a report, trimmed of surrounding space.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Sentence boundaries are '.', '!', '?' and ';'. Empty segments are dropped.
std::vector<SentenceSpan> sentence_spans(std::string_view text);

}  // namespace cxrkg
