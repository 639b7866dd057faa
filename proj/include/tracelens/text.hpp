#pragma once

// Lexical layer shared by the clause analyzer, the trace linker and the
// detectors. Everything here is English-only heuristics over UTF-8 bytes;
// non-ASCII text passes through untouched and simply matches no lexicon.

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tracelens {

// Half-open byte range [begin, end) into a UTF-8 string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool empty() const { return end <= begin; }
  std::size_t size() const { return empty() ? 0 : end - begin; }
  bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
  bool overlaps(const Span& other) const { return begin < other.end && other.begin < end; }
  Span shifted(std::size_t offset) const { return {begin + offset, end + offset}; }
  std::string_view slice(std::string_view text) const { return text.substr(begin, size()); }

  auto operator<=>(const Span&) const = default;
};

// A surface word: lowercased, typographic apostrophes folded to ASCII.
struct Token {
  std::string text;
  Span span;
};

}  // namespace tracelens

namespace tracelens::text {

inline constexpr std::string_view kFutureClass = "<future>";
inline constexpr std::string_view kPresentClass = "<present>";

std::vector<Token> tokenize(std::string_view text);

// Case-fold, drop punctuation other than word-internal apostrophes, collapse
// whitespace. Typographic quotes are folded first so “x” and "x" agree.
std::string normalize(std::string_view text);

// Tokens used for quotation runs: contractions expanded ("we'll" -> we will),
// temporal markers folded into kFutureClass / kPresentClass. Expanded pieces
// keep the span of the surface token they came from.
std::vector<Token> matching_tokens(std::string_view text);

// Matching tokens minus stopwords, negation cues and intensifiers, stemmed.
std::vector<Token> content_tokens(std::string_view text);
std::set<std::string> content_set(std::string_view text);

std::string stem(std::string_view word);

bool is_stopword(std::string_view word);
bool is_intensifier(std::string_view word);
bool is_affect_word(std::string_view word);

// |a ∩ b| / min(|a|, |b|); zero when either side is empty.
double overlap_coefficient(const std::set<std::string>& a, const std::set<std::string>& b);

std::set<std::string> intersection(const std::set<std::string>& a, const std::set<std::string>& b);

// Trim ASCII whitespace from both ends of span within text.
Span trim(std::string_view text, Span span);

}  // namespace tracelens::text
