#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tracelens/error.hpp"
#include "tracelens/ladder.hpp"

namespace tracelens {
namespace {

LadderPlan small_plan(std::size_t d1 = 2, std::size_t d2 = 3, std::size_t d3 = 2) {
  LadderPlan p;
  p.baseline_prompt = "baseline";
  for (std::size_t i = 0; i < d1; ++i) p.escalation[0].push_back("l1 prompt " + std::to_string(i));
  for (std::size_t i = 0; i < d2; ++i) p.escalation[1].push_back("l2 prompt " + std::to_string(i));
  for (std::size_t i = 0; i < d3; ++i) p.escalation[2].push_back("l3 prompt " + std::to_string(i));
  p.reveal_prompt = "reveal";
  p.mechanism_prompt = "mechanism";
  p.human_experience_prompt = "human experience";
  return p;
}

// Feeds verdicts in order, answering every prompt, until the state closes.
LadderState drive(LadderState s, std::vector<bool> verdicts) {
  std::size_t v = 0, reply = 0;
  while (!is_closed(s)) {
    if (std::holds_alternative<phase::Baseline>(s.phase)) {
      s = record_baseline(s, "baseline reply");
    } else if (s.pending) {
      if (v >= verdicts.size()) throw std::logic_error("ran out of verdicts");
      s = apply_judgment(s, verdicts[v++]);
    } else if (std::holds_alternative<phase::Reveal>(s.phase)) {
      s = run_gestalt(s);
    } else {
      s = record_subject_turn(s, "reply " + std::to_string(reply++));
    }
  }
  EXPECT_EQ(v, verdicts.size());
  return s;
}

TEST(Ladder, StartFromExhibit) {
  const auto s = start_session(testing::ue01_exhibit());
  EXPECT_TRUE(std::holds_alternative<phase::Baseline>(s.phase));
  EXPECT_TRUE(s.history.empty());
  EXPECT_EQ(s.socratic_turns, 0u);
  EXPECT_TRUE(s.awaiting_response);
  EXPECT_EQ(start_session(testing::ue01_exhibit()), s);
}

TEST(Ladder, ExhibitWithoutLocusPromptsIsInvalid) {
  auto e = testing::ue01_exhibit();
  e.escalation_prompts[1].clear();
  try {
    start_session(e);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& err) {
    EXPECT_NE(std::string(err.what()).find("locus"), std::string::npos) << err.what();
  }
}

TEST(Ladder, RecordBaselineOnce) {
  const auto s = record_baseline(start_session(small_plan()), "answer");
  EXPECT_EQ(s.phase, Phase(phase::Socratic{Level::AnomalyDetection, 0}));
  ASSERT_TRUE(s.pending);
  EXPECT_EQ(s.pending->level, Level::AnomalyDetection);
  EXPECT_EQ(s.history.at(0).response, "answer");
  EXPECT_EQ(s.socratic_turns, 0u);
  EXPECT_THROW(record_baseline(s, "again"), IllegalTransition);
}

TEST(Ladder, EmptyResponseStoredAndFlagged) {
  const auto s = record_baseline(start_session(small_plan()), "  ");
  EXPECT_EQ(s.history.at(0).response, "  ");
  EXPECT_TRUE(s.history.at(0).empty_response);
}

TEST(Ladder, ScriptedBaselineHashIsGolden) {
  // Frozen from a mock run of the shipped exhibit and the first scripted reply.
  const auto script = nlohmann::json::parse(testing::read_file(testing::data_dir() / "scripts" / "ue01_script.json"));
  const auto s = record_baseline(start_session(testing::ue01_exhibit()), script.at(0).get<std::string>());
  EXPECT_EQ(state_hash(s), state_hash(record_baseline(start_session(testing::ue01_exhibit()), script.at(0).get<std::string>())));
  EXPECT_EQ(state_hash(s), 2842771655304808305ULL);
}

TEST(Ladder, AllCorrectAtBaseline) {
  const auto s = drive(start_session(small_plan()), {true, true, true});
  for (const auto& o : s.level_outcomes) {
    EXPECT_TRUE(o.achieved);
    EXPECT_EQ(o.at_step, 0u);
  }
  const auto sc = score_session(s, true);
  EXPECT_EQ(sc, (SessionScores{true, Locus::Independent, true, true, 0, true}));
  EXPECT_FALSE(s.pointing_used);
}

TEST(Ladder, LocusAfterPointingIsPrompted) {
  // L1 at baseline, L2 fails until the last (pointing) prompt, L3 first try.
  const auto s = drive(start_session(small_plan(2, 3, 2)), {true, false, false, false, true, true});
  EXPECT_TRUE(s.pointing_used);
  const auto sc = score_session(s, false);
  EXPECT_EQ(sc.locus, Locus::Prompted);
  EXPECT_EQ(sc.tte, 3u);
  EXPECT_TRUE(sc.characterization);
}

TEST(Ladder, ExhaustionRevealsThenGestalt) {
  LadderState s = record_baseline(start_session(small_plan(1, 1, 1)), "b");
  s = apply_judgment(s, true);
  s = apply_judgment(s, false);
  EXPECT_TRUE(s.pointing_used);
  s = record_subject_turn(s, "r1");
  s = apply_judgment(s, false);
  EXPECT_TRUE(std::holds_alternative<phase::Reveal>(s.phase));
  EXPECT_TRUE(s.revealed);
  s = run_gestalt(s);
  EXPECT_EQ(s.phase, Phase(phase::Gestalt{phase::GestaltStage::Mechanism}));
  EXPECT_EQ(s.current_prompt, "reveal\n\nmechanism");
  s = record_subject_turn(s, "m");
  s = record_subject_turn(s, "h");
  ASSERT_TRUE(is_closed(s));
  const auto sc = score_session(s, false);
  EXPECT_EQ(sc.locus, Locus::Unreached);
  EXPECT_FALSE(sc.characterization);
  EXPECT_EQ(sc.tte, 1u);
}

TEST(Ladder, FourSocraticTurnsThenSuccess) {
  // L1 at turn 2, L2 at turn 3, L3 at turn 4.
  const auto s = drive(start_session(small_plan(2, 3, 2)), {false, false, true, false, true, false, true});
  EXPECT_EQ(s.socratic_turns, 4u);
  EXPECT_EQ(score_session(s, true).tte, 4u);
  EXPECT_EQ(score_session(s, true).locus, Locus::Independent);
}

TEST(Ladder, GestaltDoesNotCountTurns) {
  auto s = drive(start_session(small_plan()), {true, true, true});
  EXPECT_EQ(s.socratic_turns, 0u);
  ASSERT_EQ(s.history.size(), 3u);
  EXPECT_EQ(s.history[1].prompt, "mechanism");
  EXPECT_EQ(s.history[2].prompt, "human experience");
}

TEST(Ladder, ClosedRejectsEverything) {
  const auto s = drive(start_session(small_plan()), {true, true, true});
  EXPECT_THROW(record_subject_turn(s, "x"), IllegalTransition);
  EXPECT_THROW(apply_judgment(s, true), IllegalTransition);
  EXPECT_THROW(run_gestalt(s), IllegalTransition);
  EXPECT_THROW(record_baseline(s, "x"), IllegalTransition);
}

TEST(Ladder, ScoreBeforeCloseIsIllegal) {
  EXPECT_THROW(score_session(start_session(small_plan()), true), IllegalTransition);
}

TEST(Ladder, JudgmentWithoutPendingIsIllegal) {
  auto s = record_baseline(start_session(small_plan()), "b");
  s = apply_judgment(s, false);
  const auto before = s;
  EXPECT_THROW(apply_judgment(s, true), IllegalTransition);
  EXPECT_EQ(s, before);
}

TEST(Ladder, PlanJsonRoundTrip) {
  const auto p = plan_from_exhibit(testing::ue01_exhibit());
  EXPECT_EQ(plan_from_json(nlohmann::json::parse(to_json(p).dump())), p);
}

TEST(Ladder, PhaseOrderIsLexicographicDag) {
  EXPECT_LT(phase_order(phase::Baseline{}), phase_order(phase::Socratic{}));
  EXPECT_LT(phase_order(phase::Socratic{Level::AnomalyDetection, 5}),
            phase_order(phase::Socratic{Level::LocusIdentification, 0}));
  EXPECT_LT(phase_order(phase::Socratic{Level::DegenerationCharacterization, 9}), phase_order(phase::Reveal{}));
  EXPECT_LT(phase_order(phase::Reveal{}), phase_order(phase::Gestalt{}));
  EXPECT_LT(phase_order(phase::Gestalt{phase::GestaltStage::Mechanism}),
            phase_order(phase::Gestalt{phase::GestaltStage::HumanExperience}));
  EXPECT_LT(phase_order(phase::Gestalt{phase::GestaltStage::HumanExperience}), phase_order(phase::Closed{}));
}

}  // namespace
}  // namespace tracelens
