#include "tracelens/clause.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace tracelens {
namespace {

using WordSet = std::unordered_set<std::string_view>;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Part before the first apostrophe: "it's" -> "it".
std::string_view head(std::string_view word) { return word.substr(0, word.find('\'')); }

// Length of a terminator at text[i]: . ! ? or the ellipsis code point.
std::size_t terminator_at(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '.' || c == '!' || c == '?') return 1;
  if (text.substr(i, 3) == "\xE2\x80\xA6") return 3;
  return 0;
}

std::size_t closer_at(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  const auto cp = text.substr(i, 3);
  if (cp == "\xE2\x80\x99" || cp == "\xE2\x80\x9D") return 3;
  return 0;
}

bool is_abbreviation(std::string_view word) {
  static const WordSet words = {"e.g", "i.e", "etc", "vs", "mr", "mrs", "ms", "dr", "cf", "approx", "st"};
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return words.contains(lower);
}

// Word (letters and interior dots) ending right before position i.
std::string_view word_before(std::string_view text, std::size_t i) {
  std::size_t b = i;
  while (b > 0 && (std::isalnum(static_cast<unsigned char>(text[b - 1])) || text[b - 1] == '.')) --b;
  return text.substr(b, i - b);
}

std::vector<Span> sentence_spans(std::string_view text) {
  std::vector<Span> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    Span s = text::trim(text, {b, e});
    if (!s.empty()) out.push_back(s);
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '\n') {
      emit(start, i);
      start = ++i;
      continue;
    }
    std::size_t len = terminator_at(text, i);
    if (len == 0) {
      ++i;
      continue;
    }
    const std::size_t run_begin = i;
    std::size_t j = i;
    while (j < text.size() && (len = terminator_at(text, j)) > 0) j += len;
    while (j < text.size() && (len = closer_at(text, j)) > 0) j += len;
    const bool boundary = j == text.size() || is_space(text[j]);
    const bool single_dot = j - run_begin == 1 && text[run_begin] == '.';
    if (boundary && !(single_dot && is_abbreviation(word_before(text, run_begin)))) {
      emit(start, j);
      start = j;
    }
    i = j;
  }
  emit(start, text.size());
  return out;
}

bool subject_starter(std::string_view word) {
  static const WordSet words = {"i", "we", "you", "he", "she", "they", "it", "this", "that", "there"};
  return words.contains(head(word)) && (word.find('\'') != std::string_view::npos || words.contains(word));
}

char prev_non_space(std::string_view text, std::size_t i) {
  while (i > 0) {
    if (!is_space(text[i - 1])) return text[i - 1];
    --i;
  }
  return '\0';
}

// Split one sentence into clause spans.
void split_sentence(std::string_view text, Span sentence, std::vector<Span>& out) {
  static const WordSet contrastive = {"but", "however", "although", "whereas"};
  static const WordSet coordinating = {"and", "or", "so"};
  static const WordSet discourse = {"today", "now", "meanwhile", "instead", "however"};

  const auto sv = sentence.slice(text);
  auto tokens = text::tokenize(sv);
  for (auto& t : tokens) t.span = t.span.shifted(sentence.begin);

  std::vector<std::size_t> cuts;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const auto& w = tokens[k].text;
    const std::size_t at = tokens[k].span.begin;
    const bool has_next = k + 1 < tokens.size();
    const char before = prev_non_space(text, at);
    const char after = tokens[k].span.end < text.size() ? text[tokens[k].span.end] : '\0';
    if (has_next && contrastive.contains(w)) cuts.push_back(at);
    else if (has_next && w == "yet" && before == ',') cuts.push_back(at);
    else if (has_next && coordinating.contains(w) && subject_starter(tokens[k + 1].text)) cuts.push_back(at);
    else if (has_next && discourse.contains(w) && after == ',' && (before == ',' || before == ';'))
      cuts.push_back(at);
  }
  for (std::size_t p = sentence.begin; p < sentence.end; ++p)
    if (text[p] == ';') cuts.push_back(p + 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Span> pieces;
  std::size_t start = sentence.begin;
  for (std::size_t cut : cuts) {
    pieces.push_back(text::trim(text, {start, cut}));
    start = cut;
  }
  pieces.push_back(text::trim(text, {start, sentence.end}));

  // Pieces without any word (a stray ";") fold into their neighbour so the
  // sentence stays fully covered.
  std::vector<Span> merged;
  for (const auto& p : pieces) {
    if (p.empty()) continue;
    const bool wordless = text::tokenize(p.slice(text)).empty();
    if (wordless && !merged.empty()) {
      merged.back().end = p.end;
    } else if (!merged.empty() && text::tokenize(merged.back().slice(text)).empty()) {
      merged.back().end = p.end;
    } else {
      merged.push_back(p);
    }
  }
  out.insert(out.end(), merged.begin(), merged.end());
}

const WordSet& negation_cues() {
  static const WordSet words = {"not", "no", "nor", "never", "without", "cannot"};
  return words;
}

bool is_particle_punct(char c) {
  return c == ',' || c == '.' || c == '!' || c == '?' || c == ';' || c == ':';
}

// Byte offset, within the token's source text, of the "n" in "n't".
std::size_t nt_offset(std::string_view source) {
  if (ends_with(source, "\xE2\x80\x99t") || ends_with(source, "\xE2\x80\x99T")) return source.size() - 5;
  return source.size() - 3;
}

std::optional<PersonClass> person_of(std::string_view w) {
  static const WordSet first_singular = {"i", "me", "my", "mine", "myself", "i'm", "i've", "i'll", "i'd"};
  static const WordSet first_plural = {"we",     "us",    "our",   "ours", "ourselves",
                                       "let's",  "we're", "we've", "we'll", "we'd"};
  static const WordSet second = {"you",      "your",     "yours",    "yourself", "yourselves",
                                 "you're",   "you've",   "you'll",   "you'd",    "y'all"};
  static const WordSet third = {"he",     "him",    "his",     "himself", "she",     "her",
                                "hers",   "herself", "they",   "them",    "their",   "theirs",
                                "themselves", "it",  "its",    "itself",  "he's",    "she's",
                                "it's",   "they're", "they've", "they'll", "they'd", "he'll",
                                "she'll", "it'll"};
  if (first_singular.contains(w)) return PersonClass::FirstSingular;
  if (first_plural.contains(w)) return PersonClass::FirstPlural;
  if (second.contains(w)) return PersonClass::SecondPerson;
  if (third.contains(w)) return PersonClass::ThirdPerson;
  return std::nullopt;
}

struct Temporal {
  TemporalScope scope = TemporalScope::Unspecified;
  std::vector<LexicalHit> cues;
};

Temporal temporal_of(const std::vector<Token>& tokens) {
  static const WordSet future_words = {"will", "shall", "won't", "shan't", "later", "tomorrow", "eventually",
                                       "someday", "afterwards", "soon"};
  static const WordSet present_adverbs = {"today", "now", "currently", "nowadays", "immediately"};
  static const WordSet past_adverbs = {"yesterday", "ago", "previously", "earlier", "formerly"};
  static const WordSet present_aux = {"do", "does", "am", "is", "are", "don't", "doesn't", "isn't", "aren't"};
  static const WordSet past_aux = {"was", "were", "did", "had", "didn't", "wasn't", "weren't", "hadn't"};

  std::vector<LexicalHit> future, present_adv, past_adv, present, past;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& w = tokens[k].text;
    const LexicalHit hit{w, tokens[k].span};
    if (future_words.contains(w) || ends_with(w, "'ll")) {
      future.push_back(hit);
    } else if (w == "going" && k + 1 < tokens.size() && tokens[k + 1].text == "to") {
      future.push_back({"going to", {tokens[k].span.begin, tokens[k + 1].span.end}});
    } else if (w == "future") {
      for (std::size_t back = 1; back <= 4 && back <= k; ++back)
        if (tokens[k - back].text == "in") {
          future.push_back({"in future", {tokens[k - back].span.begin, tokens[k].span.end}});
          break;
        }
    } else if (present_adverbs.contains(w)) {
      present_adv.push_back(hit);
    } else if (past_adverbs.contains(w)) {
      past_adv.push_back(hit);
    } else if ((w == "need" || w == "needs") && k + 1 < tokens.size() && tokens[k + 1].text == "to") {
      present.push_back({w + " to", {tokens[k].span.begin, tokens[k + 1].span.end}});
    } else if (present_aux.contains(w) || ends_with(w, "'m") || ends_with(w, "'re")) {
      present.push_back(hit);
    } else if (past_aux.contains(w)) {
      past.push_back(hit);
    }
  }
  if (!future.empty()) return {TemporalScope::Future, future};
  if (!present_adv.empty()) return {TemporalScope::Present, present_adv};
  if (!past_adv.empty()) return {TemporalScope::Past, past_adv};
  if (!present.empty()) return {TemporalScope::Present, present};
  if (!past.empty()) return {TemporalScope::Past, past};
  return {};
}

}  // namespace

std::string_view to_string(Polarity p) { return p == Polarity::Negated ? "negated" : "affirmative"; }

std::string_view to_string(TemporalScope t) {
  switch (t) {
    case TemporalScope::Past: return "past";
    case TemporalScope::Present: return "present";
    case TemporalScope::Future: return "future";
    case TemporalScope::Unspecified: break;
  }
  return "unspecified";
}

std::string_view to_string(PersonClass p) {
  switch (p) {
    case PersonClass::FirstSingular: return "first_singular";
    case PersonClass::FirstPlural: return "first_plural";
    case PersonClass::SecondPerson: return "second_person";
    case PersonClass::ThirdPerson: break;
  }
  return "third_person";
}

std::size_t PersonMarkers::count(PersonClass p) const {
  return static_cast<std::size_t>(
      std::count_if(hits.begin(), hits.end(), [p](const PersonMarker& m) { return m.person == p; }));
}

std::vector<LexicalHit> PersonMarkers::second_person_possessives() const {
  std::vector<LexicalHit> out;
  for (const auto& m : hits)
    if (m.hit.text == "your" || m.hit.text == "yours") out.push_back(m.hit);
  return out;
}

NegationResult detect_negation(std::string_view clause) {
  NegationResult result;
  const auto tokens = text::tokenize(clause);
  std::size_t first_cue_token = tokens.size();
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (ends_with(t.text, "n't")) {
      const auto source = t.span.slice(clause);
      result.cues.push_back({"n't", {t.span.begin + nt_offset(source), t.span.end}});
    } else if (negation_cues().contains(t.text)) {
      const bool particle = (t.text == "no" || t.text == "not") && t.span.end < clause.size() &&
                            is_particle_punct(clause[t.span.end]);
      if (particle) continue;
      result.cues.push_back({t.text, t.span});
    } else {
      continue;
    }
    if (first_cue_token == tokens.size()) first_cue_token = k;
  }
  if (first_cue_token + 1 < tokens.size())
    result.scope = Span{tokens[first_cue_token + 1].span.begin, tokens.back().span.end};
  result.negated = !result.cues.empty() && result.scope.has_value();
  return result;
}

std::vector<Span> clause_spans(std::string_view turn_text) {
  std::vector<Span> out;
  for (const auto& sentence : sentence_spans(turn_text)) split_sentence(turn_text, sentence, out);
  return out;
}

ClauseAnalysis analyze_clause(std::string_view text, Span span) {
  ClauseAnalysis c;
  c.span = span;
  const auto body = span.slice(text);
  c.text = std::string(body);

  auto neg = detect_negation(body);
  for (auto& cue : neg.cues) cue.span = cue.span.shifted(span.begin);
  c.negation_cues = std::move(neg.cues);
  if (neg.scope) c.negation_scope = neg.scope->shifted(span.begin);
  c.polarity = neg.negated ? Polarity::Negated : Polarity::Affirmative;

  auto tokens = text::tokenize(body);
  for (auto& t : tokens) t.span = t.span.shifted(span.begin);

  for (const auto& t : tokens) {
    if (text::is_intensifier(t.text)) c.intensifiers.push_back({t.text, t.span});
    if (text::is_affect_word(t.text)) c.affect_markers.push_back({t.text, t.span});
    if (auto p = person_of(t.text)) c.person_markers.hits.push_back({*p, {t.text, t.span}});
  }
  auto temporal = temporal_of(tokens);
  c.temporal_scope = temporal.scope;
  c.temporal_cues = std::move(temporal.cues);
  return c;
}

std::vector<ClauseAnalysis> segment_clauses(std::string_view turn_text) {
  std::vector<ClauseAnalysis> out;
  for (const auto& span : clause_spans(turn_text)) out.push_back(analyze_clause(turn_text, span));
  return out;
}

}  // namespace tracelens
