#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tracelens/finding.hpp"
#include "tracelens/transcript.hpp"

namespace tracelens {

struct GroundingState {
  std::size_t turn_index = 0;
  std::set<std::string> eclipsed_origins;
  std::size_t asymmetry_count = 0;

  bool operator==(const GroundingState&) const = default;
};

// One state per turn. An origin is eclipsed from its finding's recapitulant
// turn on; it is released only once every finding eclipsing it has been
// contested by a later human turn (meta "contests" naming the recapitulant).
// Throws InvalidReference when a finding names a trace the transcript lacks.
std::vector<GroundingState> grounding_timeline(const Transcript& transcript,
                                               const std::vector<MutationFinding>& findings);

enum class RepairPosition { SecondPositionAvailable, ThirdPositionAvailable, NoOpportunity, RepairObserved };

std::string_view to_string(RepairPosition p);

// RepairObserved > ThirdPositionAvailable (a human turn follows) >
// SecondPositionAvailable (only model turns follow) > NoOpportunity.
RepairPosition classify_repair_position(const Transcript& transcript, const MutationFinding& finding);

nlohmann::ordered_json to_json(const GroundingState& s);

}  // namespace tracelens
