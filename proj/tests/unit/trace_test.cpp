#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tracelens/error.hpp"
#include "tracelens/trace.hpp"

namespace tracelens {
namespace {

// Twelve content words per side, six shared. Every word is its own stem and
// none is a stopword, so the oracle is plain set arithmetic.
const std::vector<std::string> kLeft = {"apple", "banana", "cherry", "dragon", "engine", "forest",
                                        "guitar", "harbor", "island", "jacket", "kettle", "lantern"};
const std::vector<std::string> kRight = {"apple", "banana", "cherry", "dragon", "engine", "forest",
                                         "meadow", "nickel", "orchid", "pepper", "quartz", "rocket"};

std::string join(const std::vector<std::string>& w) {
  std::string s;
  for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
  return s;
}

double oracle_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t shared = 0;
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) ++shared;
  return static_cast<double>(shared) / static_cast<double>(std::min(a.size(), b.size()));
}

TEST(Trace, SixOfTwelveMatchesOracle) {
  const double expected = oracle_overlap(kLeft, kRight);
  ASSERT_DOUBLE_EQ(expected, 0.5);
  EXPECT_DOUBLE_EQ(match_score(join(kLeft), join(kRight)), expected);
}

TEST(Trace, SixOfTwelveOracleOverShuffles) {
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    auto a = kLeft, b = kRight;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_DOUBLE_EQ(match_score(join(a), join(b)), 0.5);
  }
}

TEST(Trace, VerbatimRepeatIsQuotation) {
  Transcript t("repeat");
  t.append(Speaker::Human, "Keep the resolver small and boring.");
  t.append(Speaker::Model, "Keep the resolver small and boring.");
  const auto links = link_recapitulants(t);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].match_kind, MatchKind::Quotation);
  EXPECT_EQ(links[0].match_score, 1.0);
  EXPECT_EQ(links[0].origin, "t0.c0");
  EXPECT_EQ(links[0].recapitulant, "t1.c0");
}

TEST(Trace, UeNearQuotation) {
  const auto t = testing::load_data_transcript("ue01");
  const auto links = link_recapitulants(t);
  const auto it = std::find_if(links.begin(), links.end(), [](const TraceLink& l) { return l.recapitulant == "t1.q0"; });
  ASSERT_NE(it, links.end());
  EXPECT_EQ(it->origin, "t0.c0");
  EXPECT_EQ(it->match_kind, MatchKind::NearQuotation);
  EXPECT_GE(it->match_score, LinkConfig{}.threshold);
}

TEST(Trace, QuotedSpans) {
  const std::string s = "No abstractions, no 'later we'll unify', no 'x'.";
  const auto spans = quoted_spans(s);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].slice(s), "later we'll unify");
}

TEST(Trace, SharedRunNeedsContentWord) {
  EXPECT_EQ(longest_shared_run("we walked to the park", "so off to the beach").length, 0u);
  // Temporal classes are not stopwords: "later we'll" runs against "future, we will".
  EXPECT_EQ(longest_shared_run("in the future, we will go", "later we'll see").length, 3u);
  EXPECT_GE(longest_shared_run("we will unify it", "later we'll unify").length, 3u);
}

TEST(Trace, UnrelatedTurnsDoNotLink) {
  EXPECT_TRUE(link_recapitulants(testing::exchange("The cat sat on the mat.", "Rust compiles slowly.")).empty());
  EXPECT_FALSE(classify_match("The cat sat on the mat.", "Rust compiles slowly."));
}

TEST(Trace, GraphLookupAndRoles) {
  const auto t = testing::load_data_transcript("ue01");
  const TraceGraph g(t);
  EXPECT_EQ(g.trace("t0.c0").role, TraceRole::Origin);
  EXPECT_EQ(g.trace("t1.q0").role, TraceRole::Recapitulant);
  EXPECT_EQ(g.trace("t1.q0").kind, TraceKind::Quote);
  EXPECT_EQ(g.polarity_of(g.trace("t1.q0")), Polarity::Negated);
  EXPECT_EQ(g.temporal_of(g.trace("t0.c0")), TemporalScope::Future);
  EXPECT_THROW(g.trace("t9.c9"), InvalidReference);
  EXPECT_EQ(g.find("nope"), nullptr);
}

TEST(Trace, SpansLieWithinTurns) {
  for (const char* name : {"ue01", "schematic", "gd01"}) {
    const auto t = testing::load_data_transcript(name);
    for (const auto& tr : build_traces(t)) EXPECT_LE(tr.span.end, t.at(tr.turn_index).text.size()) << tr.id;
  }
}

// Transcripts assembled from overlapping phrases so links actually form.
Transcript random_transcript(std::mt19937& rng) {
  static const std::vector<std::string> phrases = {
      "we will unify the framework later", "I do not want the specs",    "today I need to escape",
      "keep the resolver small",           "you want the specs again",   "no more framework work",
      "the resolver stays small today",    "later we'll unify it",       "we should test the parser",
      "the parser needs tests",            "ship the parser now",        "are we really done?"};
  Transcript t("random");
  const auto turns = 2 + rng() % 6;
  for (std::size_t i = 0; i < turns; ++i) {
    std::string text;
    const auto n = 1 + rng() % 3;
    for (std::size_t k = 0; k < n; ++k) text += phrases[rng() % phrases.size()] + ". ";
    t.append(i % 2 ? Speaker::Model : Speaker::Human, text);
  }
  return t;
}

TEST(TraceProperty, LinksOrderedScoredAndDeterministic) {
  std::mt19937 rng(5);
  const LinkConfig config;
  for (int iter = 0; iter < 300; ++iter) {
    const auto t = random_transcript(rng);
    const TraceGraph g(t);
    for (const auto& l : g.links()) {
      const auto& o = g.trace(l.origin);
      const auto& r = g.trace(l.recapitulant);
      EXPECT_LT(o.turn_index, r.turn_index);
      EXPECT_GE(l.match_score, 0.0);
      EXPECT_LE(l.match_score, 1.0);
      EXPECT_GE(l.match_score, config.threshold);
      const bool identical = text::normalize(g.text_of(o)) == text::normalize(g.text_of(r));
      EXPECT_EQ(l.match_kind == MatchKind::Quotation, identical);
      if (l.match_kind == MatchKind::Quotation) {
        EXPECT_EQ(l.match_score, 1.0);
      }
    }
    const Transcript copy = t;
    EXPECT_EQ(link_recapitulants(copy), g.links());
  }
}

}  // namespace
}  // namespace tracelens
