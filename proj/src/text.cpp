#include "cxrkg/text.hpp"

#include <cctype>

namespace cxrkg {
namespace {

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_boundary(char c) { return c == '.' || c == '!' || c == '?' || c == ';'; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

Tokens tokenize(std::string_view s) {
  Tokens tokens;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (is_word_byte(c)) {
      const auto u = static_cast<unsigned char>(c);
      cur.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
    } else if (c == '-' && !cur.empty() && i + 1 < s.size() && is_word_byte(s[i + 1])) {
      cur.push_back('-');
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string join(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (const char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<SentenceSpan> sentence_spans(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  auto flush = [&](std::size_t stop) {
    std::size_t b = start;
    std::size_t e = stop;
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) spans.push_back({b, e});
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_boundary(text[i])) {
      flush(i);
      start = i + 1;
    }
  }
  flush(text.size());
  return spans;
}

}  // namespace cxrkg
