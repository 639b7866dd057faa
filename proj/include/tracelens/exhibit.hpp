#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelens/transcript.hpp"

namespace tracelens {

enum class Level { AnomalyDetection = 0, LocusIdentification = 1, DegenerationCharacterization = 2 };

inline constexpr std::array<Level, 3> kLevels = {Level::AnomalyDetection, Level::LocusIdentification,
                                                 Level::DegenerationCharacterization};

std::string_view to_string(Level l);
Level level_from_string(std::string_view s);
inline std::size_t index_of(Level l) { return static_cast<std::size_t>(l); }

struct CanonicalLocus {
  std::string origin;
  std::string recapitulant;

  bool operator==(const CanonicalLocus&) const = default;
};

// A stimulus for the elicitation ladder. Prompt wording is data so the
// protocol can be revised without a rebuild.
struct Exhibit {
  std::string id;
  std::string framing_prompt;
  Transcript exchange;
  CanonicalLocus canonical_locus;
  std::string canonical_anomaly;
  std::string canonical_degeneration;
  std::string canonical_human_experience;
  // Per level, increasing specificity. The last locus prompt points explicitly.
  std::array<std::vector<std::string>, 3> escalation_prompts;
  std::string reveal_prompt;
  std::string mechanism_prompt;
  std::string human_experience_prompt;

  bool operator==(const Exhibit&) const = default;
};

// Throws ValidationError naming every missing or inconsistent field.
void validate(const Exhibit& exhibit);

// Framing followed by the exchange rendered as "Human:" / "LLM:" lines.
std::string baseline_prompt(const Exhibit& exhibit);

nlohmann::ordered_json to_json(const Exhibit& exhibit);
Exhibit exhibit_from_json(const nlohmann::json& j);
Exhibit load_exhibit(const std::filesystem::path& path);

}  // namespace tracelens
