#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tracelens/clause.hpp"

namespace tracelens {
namespace {

std::vector<std::string> hit_texts(const std::vector<LexicalHit>& hits) {
  std::vector<std::string> out;
  for (const auto& h : hits) out.push_back(h.text);
  return out;
}

TEST(Clause, SchematicNegatedClause) {
  const std::string s = "I absolutely do not want to get back into specs.";
  const auto clauses = segment_clauses(s);
  ASSERT_EQ(clauses.size(), 1u);
  const auto& c = clauses[0];
  EXPECT_EQ(c.polarity, Polarity::Negated);
  EXPECT_EQ(hit_texts(c.negation_cues), std::vector<std::string>{"not"});
  EXPECT_EQ(hit_texts(c.intensifiers), std::vector<std::string>{"absolutely"});
  EXPECT_EQ(c.temporal_scope, TemporalScope::Present);
}

TEST(Clause, EmptyInputYieldsNothing) {
  EXPECT_TRUE(segment_clauses("").empty());
  EXPECT_TRUE(segment_clauses("   \n ").empty());
}

TEST(Clause, UeHumanTurnHasTwoTimescales) {
  const auto t = testing::load_data_transcript("ue01");
  const auto clauses = segment_clauses(t.at(0).text);
  ASSERT_EQ(clauses.size(), 2u);
  EXPECT_EQ(clauses[0].temporal_scope, TemporalScope::Future);
  EXPECT_EQ(clauses[0].polarity, Polarity::Affirmative);
  EXPECT_NE(clauses[0].text.find("will build back"), std::string::npos);
  EXPECT_EQ(clauses[1].temporal_scope, TemporalScope::Present);
  EXPECT_EQ(clauses[1].text.rfind("Today, I need", 0), 0u);
}

TEST(Clause, ContrastiveMarkerSplits) {
  const auto clauses = segment_clauses("I like the parser but the lexer is slow.");
  ASSERT_EQ(clauses.size(), 2u);
  EXPECT_EQ(clauses[1].text.rfind("but", 0), 0u);
}

TEST(Clause, PersonMarkers) {
  const auto c = segment_clauses("So yes, you've been sneaking theoretical content into your section.");
  ASSERT_FALSE(c.empty());
  EXPECT_TRUE(c[0].person_markers.has(PersonClass::SecondPerson));
  EXPECT_FALSE(c[0].person_markers.has(PersonClass::FirstPlural));
  EXPECT_EQ(c[0].person_markers.second_person_possessives().size(), 1u);
  const auto w = segment_clauses("are we really sneaking a different section in?");
  ASSERT_FALSE(w.empty());
  EXPECT_TRUE(w[0].person_markers.has(PersonClass::FirstPlural));
}

TEST(Negation, SchematicScopeCoversVerbPhrase) {
  const std::string s = "I absolutely do not want to get back into specs";
  const auto r = detect_negation(s);
  ASSERT_TRUE(r.negated);
  ASSERT_EQ(r.cues.size(), 1u);
  EXPECT_EQ(r.cues[0].text, "not");
  ASSERT_TRUE(r.scope);
  EXPECT_EQ(r.scope->slice(s), "want to get back into specs");
}

TEST(Negation, AbsentCue) { EXPECT_FALSE(detect_negation("I want to get back into specs").negated); }

TEST(Negation, ProhibitiveList) {
  const auto r = detect_negation("No abstractions, no 'later we'll unify'");
  ASSERT_TRUE(r.negated);
  ASSERT_EQ(r.cues.size(), 2u);
  EXPECT_EQ(r.cues[0].text, "no");
  EXPECT_EQ(r.cues[1].text, "no");
}

TEST(Negation, ContractedCue) {
  const std::string s = "we shouldn't merge the branch";
  const auto r = detect_negation(s);
  ASSERT_TRUE(r.negated);
  EXPECT_EQ(r.cues[0].span.slice(s), "n't");
}

TEST(Negation, ResponseParticleIsNotACue) { EXPECT_FALSE(detect_negation("No, that is fine").negated); }

TEST(Negation, PolarityMatchesCuesAndScope) {
  for (const char* s : {"I never said that", "without any tests", "nor the docs", "keep it", "not"}) {
    const auto c = analyze_clause(s, {0, std::string_view(s).size()});
    const bool expect = !c.negation_cues.empty() && c.negation_scope && !c.negation_scope->empty();
    EXPECT_EQ(c.polarity == Polarity::Negated, expect) << s;
  }
}

// Random sentences from a small vocabulary with punctuation and markers.
std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {
      "I",     "we",    "you",  "not",     "no",    "never", "will", "today", "now",    "later",  "but",
      "and",   "so",    "the",  "parser",  "specs", "want",  "need", "to",    "build",  ";",      ",",
      ".",     "?",     "!",    "however", "yet",   "it",    "n't",  "we'll", "\n",     "\"quote", "me\"",
      "'tis",  "e.g.",  "Mr.",  "caf\xC3\xA9", "..."};
  std::uniform_int_distribution<std::size_t> len(0, 30), pick(0, vocab.size() - 1);
  std::string out;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty() && rng() % 4) out += ' ';
    out += vocab[pick(rng)];
  }
  return out;
}

// Whole words only, so removing a cue cannot fuse neighbours into a new word.
std::string random_words(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {
      "I",   "we",     "you",  "not",   "no",    "never", "will",  "today", "now",   "later", "but", "and",
      "so",  "the",    "parser", "specs", "want", "need",  "to",   "build", ";",     ",",     ".",   "?",
      "don't", "isn't", "can't", "cannot", "however", "yet", "it", "we'll", "nothing", "without"};
  std::uniform_int_distribution<std::size_t> len(0, 30), pick(0, vocab.size() - 1);
  std::string out;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += vocab[pick(rng)];
  }
  return out;
}

TEST(ClauseProperty, SpansOrderedDisjointAndCovering) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto s = random_text(rng);
    const auto spans = clause_spans(s);
    std::vector<bool> covered(s.size(), false);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      ASSERT_LE(spans[i].end, s.size()) << s;
      ASSERT_FALSE(spans[i].empty()) << s;
      if (i) {
        ASSERT_LE(spans[i - 1].end, spans[i].begin) << s;
      }
      for (auto b = spans[i].begin; b < spans[i].end; ++b) covered[b] = true;
    }
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (!std::isspace(static_cast<unsigned char>(s[b]))) {
        ASSERT_TRUE(covered[b]) << "byte " << b << " of: " << s;
      }
    }
  }
}

TEST(NegationProperty, DeletingCuesNeverLeavesBothNegated) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto s = random_words(rng);
    const auto r = detect_negation(s);
    std::string stripped = s;
    for (auto it = r.cues.rbegin(); it != r.cues.rend(); ++it) stripped.erase(it->span.begin, it->span.size());
    if (r.negated) {
      EXPECT_FALSE(detect_negation(stripped).negated) << s << " -> " << stripped;
    }
  }
}

}  // namespace
}  // namespace tracelens
