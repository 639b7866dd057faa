#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tracelens/exhibit.hpp"

namespace tracelens {

// The prompts a session will use, frozen at session start so a log can be
// replayed without the exhibit file it came from.
struct LadderPlan {
  std::string baseline_prompt;
  std::array<std::vector<std::string>, 3> escalation;
  std::string reveal_prompt;
  std::string mechanism_prompt;
  std::string human_experience_prompt;

  bool operator==(const LadderPlan&) const = default;
};

LadderPlan plan_from_exhibit(const Exhibit& exhibit);
void validate(const LadderPlan& plan);
nlohmann::ordered_json to_json(const LadderPlan& plan);
LadderPlan plan_from_json(const nlohmann::json& j);

namespace phase {
struct Baseline {
  bool operator==(const Baseline&) const = default;
};
struct Socratic {
  Level level = Level::AnomalyDetection;
  std::size_t step = 0;
  bool operator==(const Socratic&) const = default;
};
struct Reveal {
  bool operator==(const Reveal&) const = default;
};
enum class GestaltStage { Mechanism, HumanExperience };
struct Gestalt {
  GestaltStage stage = GestaltStage::Mechanism;
  bool operator==(const Gestalt&) const = default;
};
struct Closed {
  bool operator==(const Closed&) const = default;
};
}  // namespace phase

using Phase = std::variant<phase::Baseline, phase::Socratic, phase::Reveal, phase::Gestalt, phase::Closed>;

std::string phase_name(const Phase& p);
// Position in the phase DAG; strictly increases along every edge except the
// Socratic step loop, where (rank, level, step) increases lexicographically.
std::array<std::size_t, 3> phase_order(const Phase& p);

struct Judgment {
  Level level;
  bool verdict;
  bool operator==(const Judgment&) const = default;
};

struct HistoryEntry {
  std::string prompt;
  std::string response;
  std::vector<Judgment> judgments;
  bool empty_response = false;
  bool operator==(const HistoryEntry&) const = default;
};

struct LevelOutcome {
  bool achieved = false;
  std::size_t at_step = 0;  // prompts issued for the level before success
  std::size_t at_turn = 0;  // socratic_turns when achieved
  bool operator==(const LevelOutcome&) const = default;
};

struct PendingJudgment {
  Level level;
  std::size_t history_index;
  bool operator==(const PendingJudgment&) const = default;
};

struct LadderState {
  LadderPlan plan;
  Phase phase = phase::Baseline{};
  std::vector<HistoryEntry> history;
  std::size_t socratic_turns = 0;
  bool pointing_used = false;
  std::array<LevelOutcome, 3> level_outcomes{};
  std::array<std::size_t, 3> prompts_issued{};
  std::optional<PendingJudgment> pending;
  bool awaiting_response = false;
  std::string current_prompt;
  bool revealed = false;
  // socratic_turns at the last achievement or at Reveal.
  std::optional<std::size_t> tte_mark;

  bool operator==(const LadderState&) const = default;
};

enum class Locus { Independent, Prompted, Unreached };
std::string_view to_string(Locus l);
Locus locus_from_string(std::string_view s);

struct SessionScores {
  bool anomaly = false;
  Locus locus = Locus::Unreached;
  bool characterization = false;
  bool human_exp = false;
  std::size_t tte = 0;
  // Levels 2 and 3 both met by the baseline response.
  bool baseline_inversion = false;

  bool operator==(const SessionScores&) const = default;
};

nlohmann::ordered_json to_json(const SessionScores& s);
SessionScores scores_from_json(const nlohmann::json& j);

// All transitions are pure; an illegal call throws IllegalTransition and the
// input state is untouched.
LadderState start_session(const LadderPlan& plan);
LadderState start_session(const Exhibit& exhibit);
LadderState record_baseline(const LadderState& s, const std::string& response);
LadderState apply_judgment(const LadderState& s, bool verdict);
LadderState record_subject_turn(const LadderState& s, const std::string& response);
LadderState run_gestalt(const LadderState& s);
SessionScores score_session(const LadderState& s, bool human_exp_verdict);

bool is_closed(const LadderState& s);

nlohmann::ordered_json to_json(const LadderState& s);
// FNV-1a over the canonical JSON of the state.
std::uint64_t state_hash(const LadderState& s);

}  // namespace tracelens
