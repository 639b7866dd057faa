#include "tracelens/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <iterator>
#include <unordered_set>

namespace tracelens::text {
namespace {

enum class Unit { Word, Apostrophe, Separator };

struct Scan {
  Unit unit;
  std::size_t length;
};

// Classify the code point starting at text[i].
Scan scan_at(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) {
    if (std::isalnum(c)) return {Unit::Word, 1};
    if (c == '\'') return {Unit::Apostrophe, 1};
    return {Unit::Separator, 1};
  }
  std::size_t len = 1;
  if ((c & 0xE0) == 0xC0) len = 2;
  else if ((c & 0xF0) == 0xE0) len = 3;
  else if ((c & 0xF8) == 0xF0) len = 4;
  len = std::min(len, text.size() - i);
  const std::string_view cp = text.substr(i, len);
  if (cp == "\xE2\x80\x98" || cp == "\xE2\x80\x99") return {Unit::Apostrophe, len};
  static const std::array<std::string_view, 8> separators = {
      "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x94", "\xE2\x80\x93",
      "\xE2\x80\xA6", "\xC2\xA0",     "\xC2\xAB",     "\xC2\xBB"};
  for (auto s : separators)
    if (cp == s) return {Unit::Separator, len};
  return {Unit::Word, len};
}

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "a", "an", "the", "and", "or", "but", "so", "yet", "if", "then", "than", "that", "this",
      "these", "those", "there", "here", "of", "to", "in", "on", "at", "by", "for", "with",
      "from", "into", "onto", "about", "as", "up", "down", "out", "off", "over", "under",
      "is", "am", "are", "was", "were", "be", "been", "being", "do", "does", "did", "doing",
      "have", "has", "had", "having", "would", "should", "could", "can", "may", "might", "must",
      "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you", "your",
      "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
      "what", "which", "who", "whom", "whose", "when", "where", "why", "how", "all", "any",
      "both", "each", "few", "more", "most", "other", "some", "such", "only", "own", "same",
      "too", "just", "also", "again", "back", "once", "let", "get", "got", "gets", "getting",
      "yes", "ok", "okay", "well", "oh", "go", "going", "gonna", "because", "rather", "while",
      "though", "although", "however", "before", "after", "until", "very", "much", "many",
      "one", "like", "into", "via", "per", "sure", "right", "thing", "things", "s"};
  return words;
}

const std::unordered_set<std::string_view>& negation_words() {
  static const std::unordered_set<std::string_view> words = {"not", "no", "nor", "never",
                                                             "without", "cannot"};
  return words;
}

const std::unordered_set<std::string_view>& intensifiers() {
  static const std::unordered_set<std::string_view> words = {
      "absolutely", "really",    "totally",   "definitely", "completely", "entirely",
      "extremely",  "truly",     "utterly",   "certainly",  "seriously",  "literally",
      "honestly",   "genuinely", "positively"};
  return words;
}

const std::unordered_set<std::string_view>& affect_words() {
  static const std::unordered_set<std::string_view> words = {
      "bullshit", "damn",      "damned",  "hell",     "crap",    "frustrating", "frustrated",
      "furious",  "annoying",  "annoyed", "hate",     "awful",   "terrible",    "ugh",
      "angry",    "stupid",    "ridiculous", "sick",  "exhausting", "exhausted", "nightmare",
      "dystopian", "love",     "thrilled", "excited", "disaster"};
  return words;
}

const std::unordered_set<std::string_view>& future_words() {
  static const std::unordered_set<std::string_view> words = {"will",    "shall",      "later",
                                                             "future",  "tomorrow",   "eventually",
                                                             "someday", "afterwards"};
  return words;
}

const std::unordered_set<std::string_view>& present_words() {
  static const std::unordered_set<std::string_view> words = {"today", "now", "currently",
                                                             "nowadays", "immediately"};
  return words;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

void push_piece(std::vector<Token>& out, std::string_view piece, Span span) {
  if (piece.empty()) return;
  std::string word(piece);
  if (future_words().contains(word)) word = kFutureClass;
  else if (present_words().contains(word)) word = kPresentClass;
  out.push_back({std::move(word), span});
}

void expand_into(std::vector<Token>& out, const Token& tok) {
  const std::string_view w = tok.text;
  if (w == "cannot") {
    push_piece(out, "can", tok.span);
    push_piece(out, "not", tok.span);
    return;
  }
  if (w == "let's") {
    push_piece(out, "let", tok.span);
    push_piece(out, "us", tok.span);
    return;
  }
  if (ends_with(w, "n't")) {
    std::string_view base = w.substr(0, w.size() - 3);
    if (base == "wo") base = "will";
    else if (base == "ca") base = "can";
    else if (base == "sha") base = "shall";
    else if (base == "ai") base = "is";
    push_piece(out, base, tok.span);
    push_piece(out, "not", tok.span);
    return;
  }
  static const std::array<std::pair<std::string_view, std::string_view>, 5> suffixes = {{
      {"'ll", "will"}, {"'re", "are"}, {"'ve", "have"}, {"'m", "am"}, {"'d", "would"}}};
  for (const auto& [suffix, full] : suffixes) {
    if (ends_with(w, suffix) && w.size() > suffix.size()) {
      push_piece(out, w.substr(0, w.size() - suffix.size()), tok.span);
      push_piece(out, full, tok.span);
      return;
    }
  }
  if (ends_with(w, "'s") && w.size() > 2) {
    static const std::unordered_set<std::string_view> copular = {
        "it", "that", "there", "here", "what", "who", "he", "she", "where", "how", "this"};
    const auto base = w.substr(0, w.size() - 2);
    push_piece(out, base, tok.span);
    if (copular.contains(base)) push_piece(out, "is", tok.span);
    return;
  }
  push_piece(out, w, tok.span);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    Scan s = scan_at(text, i);
    if (s.unit != Unit::Word) {
      i += s.length;
      continue;
    }
    Token tok;
    tok.span.begin = i;
    while (i < text.size()) {
      s = scan_at(text, i);
      if (s.unit == Unit::Word) {
        for (std::size_t k = 0; k < s.length; ++k) {
          const auto c = static_cast<unsigned char>(text[i + k]);
          tok.text.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : text[i + k]);
        }
        i += s.length;
        continue;
      }
      if (s.unit == Unit::Apostrophe && i + s.length < text.size() &&
          scan_at(text, i + s.length).unit == Unit::Word) {
        tok.text.push_back('\'');
        i += s.length;
        continue;
      }
      break;
    }
    tok.span.end = i;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::string normalize(std::string_view text) {
  std::string out;
  for (const auto& tok : tokenize(text)) {
    if (!out.empty()) out.push_back(' ');
    out += tok.text;
  }
  return out;
}

std::vector<Token> matching_tokens(std::string_view text) {
  std::vector<Token> out;
  for (const auto& tok : tokenize(text)) expand_into(out, tok);
  return out;
}

std::string stem(std::string_view word) {
  std::string w(word);
  if (w.starts_with('<')) return w;
  if (w.size() > 4 && ends_with(w, "ies")) {
    w.replace(w.size() - 3, 3, "y");
  } else if (w.size() > 5 && ends_with(w, "ing")) {
    w.resize(w.size() - 3);
  } else if (w.size() > 4 && ends_with(w, "ed")) {
    w.resize(w.size() - 2);
  } else if (w.size() > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "sses") ||
                              ends_with(w, "xes") || ends_with(w, "zes"))) {
    w.resize(w.size() - 2);
  } else if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
             !ends_with(w, "is")) {
    w.resize(w.size() - 1);
  }
  if (w.size() > 3 && ends_with(w, "e")) w.resize(w.size() - 1);
  return w;
}

bool is_stopword(std::string_view word) { return stopwords().contains(word); }
bool is_intensifier(std::string_view word) { return intensifiers().contains(word); }
bool is_affect_word(std::string_view word) { return affect_words().contains(word); }

std::vector<Token> content_tokens(std::string_view text) {
  std::vector<Token> out;
  for (auto& tok : matching_tokens(text)) {
    if (is_stopword(tok.text) || negation_words().contains(tok.text) || is_intensifier(tok.text))
      continue;
    tok.text = stem(tok.text);
    out.push_back(std::move(tok));
  }
  return out;
}

std::set<std::string> content_set(std::string_view text) {
  std::set<std::string> out;
  for (auto& tok : content_tokens(text)) out.insert(std::move(tok.text));
  return out;
}

std::set<std::string> intersection(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

double overlap_coefficient(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  const auto shared = intersection(a, b).size();
  return static_cast<double>(shared) / static_cast<double>(std::min(a.size(), b.size()));
}

Span trim(std::string_view text, Span span) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (span.begin < span.end && is_space(text[span.begin])) ++span.begin;
  while (span.end > span.begin && is_space(text[span.end - 1])) --span.end;
  return span;
}

}  // namespace tracelens::text
