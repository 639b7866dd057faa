#include "tracelens/grounding.hpp"

#include <algorithm>
#include <limits>

#include "tracelens/error.hpp"
#include "tracelens/trace.hpp"

namespace tracelens {
namespace {

void check_ref(const std::vector<Trace>& traces, const TraceRef& ref) {
  auto it = std::find_if(traces.begin(), traces.end(), [&](const Trace& t) { return t.id == ref.trace; });
  if (it == traces.end()) throw InvalidReference("finding names unknown trace '" + ref.trace + "'");
  if (it->turn_index != ref.turn || it->span != ref.span)
    throw InvalidReference("finding trace '" + ref.trace + "' does not match its turn/span");
}

bool contests(const Transcript& transcript, std::size_t turn, const std::string& trace_id) {
  if (transcript.at(turn).speaker != Speaker::Human) return false;
  const auto ids = transcript.contested_traces(turn);
  return std::find(ids.begin(), ids.end(), trace_id) != ids.end();
}

// First turn after the recapitulant whose human speaker contests it.
std::size_t repair_turn(const Transcript& transcript, const MutationFinding& f) {
  for (std::size_t k = f.recapitulant.turn + 1; k < transcript.size(); ++k)
    if (contests(transcript, k, f.recapitulant.trace)) return k;
  return std::numeric_limits<std::size_t>::max();
}

}  // namespace

std::vector<GroundingState> grounding_timeline(const Transcript& transcript,
                                               const std::vector<MutationFinding>& findings) {
  const auto traces = build_traces(transcript);
  std::vector<std::size_t> repaired_at;
  for (const auto& f : findings) {
    check_ref(traces, f.origin);
    check_ref(traces, f.recapitulant);
    repaired_at.push_back(repair_turn(transcript, f));
  }

  std::vector<GroundingState> states;
  for (std::size_t i = 0; i < transcript.size(); ++i) {
    GroundingState s;
    s.turn_index = i;
    for (std::size_t k = 0; k < findings.size(); ++k)
      if (findings[k].recapitulant.turn <= i && i < repaired_at[k]) s.eclipsed_origins.insert(findings[k].origin.trace);
    s.asymmetry_count = s.eclipsed_origins.size();
    states.push_back(std::move(s));
  }
  return states;
}

std::string_view to_string(RepairPosition p) {
  switch (p) {
    case RepairPosition::SecondPositionAvailable: return "SecondPositionAvailable";
    case RepairPosition::ThirdPositionAvailable: return "ThirdPositionAvailable";
    case RepairPosition::NoOpportunity: return "NoOpportunity";
    case RepairPosition::RepairObserved: break;
  }
  return "RepairObserved";
}

RepairPosition classify_repair_position(const Transcript& transcript, const MutationFinding& finding) {
  const auto& turn = transcript.at(finding.recapitulant.turn);
  if (turn.speaker != Speaker::Model)
    throw InvalidReference("finding at turn " + std::to_string(turn.index) + " is not on a model turn");
  bool human_follows = false;
  bool anything_follows = false;
  for (std::size_t k = turn.index + 1; k < transcript.size(); ++k) {
    anything_follows = true;
    if (transcript.at(k).speaker == Speaker::Human) human_follows = true;
    if (contests(transcript, k, finding.recapitulant.trace)) return RepairPosition::RepairObserved;
  }
  if (human_follows) return RepairPosition::ThirdPositionAvailable;
  if (anything_follows) return RepairPosition::SecondPositionAvailable;
  return RepairPosition::NoOpportunity;
}

nlohmann::ordered_json to_json(const GroundingState& s) {
  nlohmann::ordered_json j;
  j["turn_index"] = s.turn_index;
  j["eclipsed_origins"] = s.eclipsed_origins;
  j["asymmetry_count"] = s.asymmetry_count;
  return j;
}

}  // namespace tracelens
