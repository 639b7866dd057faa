#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/text.hpp"

namespace tracelens {

enum class Polarity { Affirmative, Negated };
enum class TemporalScope { Past, Present, Future, Unspecified };
enum class PersonClass { FirstSingular = 0, FirstPlural, SecondPerson, ThirdPerson };

std::string_view to_string(Polarity p);
std::string_view to_string(TemporalScope t);
std::string_view to_string(PersonClass p);

// A lexicon match. `span` is absolute within whatever text was analyzed.
struct LexicalHit {
  std::string text;
  Span span;

  bool operator==(const LexicalHit&) const = default;
};

struct PersonMarker {
  PersonClass person;
  LexicalHit hit;

  bool operator==(const PersonMarker&) const = default;
};

// Multiset over person classes, with the hits that produced it.
struct PersonMarkers {
  std::vector<PersonMarker> hits;

  std::size_t count(PersonClass p) const;
  bool has(PersonClass p) const { return count(p) > 0; }
  // your/yours only.
  std::vector<LexicalHit> second_person_possessives() const;

  bool operator==(const PersonMarkers&) const = default;
};

struct NegationResult {
  bool negated = false;
  std::vector<LexicalHit> cues;
  std::optional<Span> scope;
};

struct ClauseAnalysis {
  Span span;
  std::string text;
  Polarity polarity = Polarity::Affirmative;
  std::vector<LexicalHit> negation_cues;
  std::optional<Span> negation_scope;
  std::vector<LexicalHit> intensifiers;
  TemporalScope temporal_scope = TemporalScope::Unspecified;
  std::vector<LexicalHit> temporal_cues;
  PersonMarkers person_markers;
  std::vector<LexicalHit> affect_markers;

  bool operator==(const ClauseAnalysis&) const = default;
};

// Negation cues {not, no, nor, never, n't, without}; scope runs from the word
// after the first cue to the last word of the clause. A bare "no"/"not"
// followed directly by punctuation is a response particle, not a cue.
NegationResult detect_negation(std::string_view clause_text);

// Sentence split on terminators, then clause split on semicolons, contrastive
// markers, clause-initial discourse markers, and and/or/so when a new subject
// follows. Spans are ordered, disjoint and cover every non-space byte.
std::vector<Span> clause_spans(std::string_view turn_text);

// Full feature analysis of text[span]; every reported span is absolute.
ClauseAnalysis analyze_clause(std::string_view text, Span span);

std::vector<ClauseAnalysis> segment_clauses(std::string_view turn_text);

}  // namespace tracelens
