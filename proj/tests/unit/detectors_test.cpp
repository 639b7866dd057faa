#include <filesystem>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tracelens/detectors.hpp"

namespace tracelens {
namespace {

std::vector<MutationSubtype> subtypes(const std::vector<MutationFinding>& fs) {
  std::vector<MutationSubtype> out;
  for (const auto& f : fs) out.push_back(f.subtype);
  return out;
}

TEST(Detectors, SchematicNegationLoss) {
  const auto fs = run_all_detectors(testing::load_data_transcript("schematic"));
  ASSERT_EQ(subtypes(fs), std::vector<MutationSubtype>{MutationSubtype::SemioticReversal_NegationLoss});
  EXPECT_EQ(fs[0].mutation_class, MutationClass::UtteranceEffacement);
  EXPECT_EQ(fs[0].severity, Severity::Inversion);
  EXPECT_EQ(fs[0].origin.trace, "t0.c0");
  EXPECT_EQ(fs[0].recapitulant.turn, 1u);
}

TEST(Detectors, UeGeneratedNegationAndScopeCollapse) {
  const auto fs = run_all_detectors(testing::load_data_transcript("ue01"));
  ASSERT_EQ(subtypes(fs), (std::vector<MutationSubtype>{MutationSubtype::SemioticReversal_GeneratedNegation,
                                                        MutationSubtype::ScopeCollapse}));
  for (const auto& f : fs) {
    EXPECT_EQ(f.origin.trace, "t0.c0");
    EXPECT_EQ(f.recapitulant.trace, "t1.q0");
    EXPECT_FALSE(f.evidence.empty());
  }
  EXPECT_EQ(fs[1].severity, Severity::Distortion);
}

TEST(Detectors, GdResidualUserOwnership) {
  const auto fs = run_all_detectors(testing::load_data_transcript("gd01"));
  ASSERT_EQ(subtypes(fs), std::vector<MutationSubtype>{MutationSubtype::ResidualUserOwnership});
  EXPECT_EQ(fs[0].mutation_class, MutationClass::GenitiveDissociation);
  EXPECT_EQ(fs[0].severity, Severity::Distortion);
  EXPECT_FALSE(fs[0].link);
}

TEST(Detectors, VerbatimRestatementIsSilent) {
  const auto t = testing::exchange("I absolutely do not want to get back into specs.",
                                   "I absolutely do not want to get back into specs.");
  const TraceGraph g(t);
  ASSERT_EQ(g.links().size(), 1u);
  EXPECT_FALSE(detect_semiotic_reversal(g, g.links()[0]));
  EXPECT_TRUE(run_all_detectors(t).empty());
}

TEST(Detectors, FutureMarkersKeptIsSilent) {
  const auto t = testing::exchange("We will refactor the parser later.", "Sure, we'll refactor the parser later.");
  const TraceGraph g(t);
  ASSERT_FALSE(g.links().empty());
  for (const auto& l : g.links()) EXPECT_FALSE(detect_scope_collapse(g, l));
}

TEST(Detectors, RefactorLaterToNowCollapses) {
  const auto t = testing::exchange("We'll refactor later.", "Refactor now.");
  const TraceGraph g(t);
  ASSERT_EQ(g.links().size(), 1u);
  const auto f = detect_scope_collapse(g, g.links()[0]);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->subtype, MutationSubtype::ScopeCollapse);
  EXPECT_EQ(subtypes(run_all_detectors(t)), std::vector<MutationSubtype>{MutationSubtype::ScopeCollapse});
}

TEST(Detectors, PersonPreservedIsSilent) {
  const auto t = testing::exchange("Are we sneaking theory into the methods section?",
                                   "We have been sneaking theory into the methods section.");
  EXPECT_FALSE(detect_residual_user_ownership(TraceGraph(t), 0, 1));
  EXPECT_TRUE(run_all_detectors(t).empty());
}

TEST(Detectors, AccountabilityGate) {
  const auto gated = testing::exchange("We sneak theory into the methods section.",
                                       "You sneak theory into the methods section.");
  EXPECT_FALSE(detect_residual_user_ownership(TraceGraph(gated), 0, 1));
  const auto open = testing::exchange("Should we sneak theory into the methods section?",
                                      "You sneak theory into the methods section.");
  EXPECT_TRUE(detect_residual_user_ownership(TraceGraph(open), 0, 1));
  EXPECT_TRUE(accountability_context(open.at(0)));
  EXPECT_FALSE(accountability_context(gated.at(0)));
}

// Model turn 2 proposes a schema; model turn 8 calls it the human's decision.
Transcript projective_transcript() {
  Transcript t("projective");
  t.append(Speaker::Human, "Can you help me store the survey results?");
  t.append(Speaker::Model, "Happy to help with that.");
  t.append(Speaker::Model, "I propose a normalized schema with one table per survey wave.");
  t.append(Speaker::Human, "Fine, go ahead with the import.");
  t.append(Speaker::Model, "The import script is running.");
  t.append(Speaker::Human, "How long will it take?");
  t.append(Speaker::Model, "About ten minutes for the full dataset.");
  t.append(Speaker::Human, "The queries are slow now.");
  t.append(Speaker::Model, "That follows from your normalized schema decision with one table per survey wave.");
  return t;
}

TEST(Detectors, ProjectiveReassignment) {
  const auto t = projective_transcript();
  const TraceGraph g(t);
  const auto f = detect_projective_reassignment(g, 8);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->subtype, MutationSubtype::ProjectiveReassignment);
  EXPECT_EQ(f->origin.turn, 2u);
  EXPECT_EQ(f->recapitulant.turn, 8u);
  EXPECT_EQ(subtypes(run_all_detectors(t)), std::vector<MutationSubtype>{MutationSubtype::ProjectiveReassignment});
}

TEST(Detectors, ProjectiveNeedsModelProvenance) {
  // The human proposed the schema first, so "your" is accurate.
  auto t = projective_transcript();
  Transcript h("human-first");
  h.append(Speaker::Human, "Use a normalized schema with one table per survey wave.");
  for (std::size_t i = 1; i < t.size(); ++i) h.append(t.at(i).speaker, t.at(i).text);
  EXPECT_FALSE(detect_projective_reassignment(TraceGraph(h), 8));
}

TEST(Detectors, GenitiveDissociationDispatch) {
  const auto gd = testing::load_data_transcript("gd01");
  const auto f = detect_genitive_dissociation(TraceGraph(gd), 0, 1);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->subtype, MutationSubtype::ResidualUserOwnership);
}

TEST(Detectors, FindingsSortedByRecapitulantTurn) {
  auto t = testing::load_data_transcript("schematic");
  t.append(Speaker::Human, "I do not want to migrate the database.");
  t.append(Speaker::Model, "You want to migrate the database.");
  const auto fs = run_all_detectors(t);
  ASSERT_EQ(fs.size(), 2u);
  EXPECT_LT(fs[0].recapitulant.turn, fs[1].recapitulant.turn);
}

TEST(Detectors, ClassAndSeverityFollowSubtype) {
  for (auto s : {MutationSubtype::SemioticReversal_NegationLoss, MutationSubtype::SemioticReversal_GeneratedNegation,
                 MutationSubtype::ScopeCollapse, MutationSubtype::ResidualUserOwnership,
                 MutationSubtype::ProjectiveReassignment}) {
    const bool reversal = s == MutationSubtype::SemioticReversal_NegationLoss ||
                          s == MutationSubtype::SemioticReversal_GeneratedNegation;
    const bool ue = reversal || s == MutationSubtype::ScopeCollapse;
    EXPECT_EQ(class_of(s) == MutationClass::UtteranceEffacement, ue);
    EXPECT_EQ(severity_of(s) == Severity::Inversion, reversal);
  }
}

TEST(Detectors, BenignControlsAreSilent) {
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(testing::data_dir() / "controls")) {
    const auto t = load_transcript(entry.path());
    EXPECT_TRUE(run_all_detectors(t).empty()) << entry.path();
    ++n;
  }
  EXPECT_EQ(n, 20u);
}

std::vector<std::string> all_turn_texts() {
  std::vector<std::string> out;
  auto add = [&](const Transcript& t) {
    for (const auto& turn : t.turns()) out.push_back(turn.text);
  };
  for (const char* name : {"ue01", "schematic", "gd01"}) add(testing::load_data_transcript(name));
  for (const auto& entry : std::filesystem::directory_iterator(testing::data_dir() / "controls"))
    add(load_transcript(entry.path()));
  add(projective_transcript());
  return out;
}

TEST(DetectorProperty, SelfComparisonIsSilent) {
  for (const auto& text : all_turn_texts()) {
    for (auto first : {Speaker::Human, Speaker::Model}) {
      Transcript t("self");
      t.append(first, text);
      t.append(Speaker::Model, text);
      EXPECT_TRUE(run_all_detectors(t).empty()) << to_string(first) << ": " << text;
    }
  }
}

TEST(Findings, JsonRoundTrip) {
  for (const char* name : {"ue01", "schematic", "gd01"}) {
    for (const auto& f : run_all_detectors(testing::load_data_transcript(name))) {
      const auto j = to_json(f);
      EXPECT_EQ(finding_from_json(nlohmann::json::parse(j.dump())), f);
      EXPECT_TRUE(j.contains("evidence"));
    }
  }
}

}  // namespace
}  // namespace tracelens
