#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelens/trace.hpp"

namespace tracelens {

enum class MutationClass { UtteranceEffacement, GenitiveDissociation };

enum class MutationSubtype {
  SemioticReversal_NegationLoss,
  SemioticReversal_GeneratedNegation,
  ScopeCollapse,
  ResidualUserOwnership,
  ProjectiveReassignment,
};

enum class Severity { Distortion, Inversion };

std::string_view to_string(MutationClass c);
std::string_view to_string(MutationSubtype s);
std::string_view to_string(Severity s);
MutationClass mutation_class_from_string(std::string_view s);
MutationSubtype mutation_subtype_from_string(std::string_view s);
Severity severity_from_string(std::string_view s);

MutationClass class_of(MutationSubtype s);
Severity severity_of(MutationSubtype s);

struct TraceRef {
  std::string trace;
  std::size_t turn = 0;
  Span span;
  std::string text;

  bool operator==(const TraceRef&) const = default;
};

// One differing feature. Spans index into the origin and recapitulant turns.
struct Evidence {
  std::string feature;
  std::string origin_value;
  std::string recap_value;
  Span origin_span;
  Span recap_span;
  std::string origin_text;
  std::string recap_text;

  bool operator==(const Evidence&) const = default;
};

struct MutationFinding {
  MutationClass mutation_class = MutationClass::UtteranceEffacement;
  MutationSubtype subtype = MutationSubtype::ScopeCollapse;
  Severity severity = Severity::Distortion;
  TraceRef origin;
  TraceRef recapitulant;
  // Absent for turn-pair findings that do not rest on a trace link.
  std::optional<TraceLink> link;
  std::vector<Evidence> evidence;

  bool operator==(const MutationFinding&) const = default;
};

TraceRef make_ref(const TraceGraph& graph, const Trace& t);

nlohmann::ordered_json to_json(const MutationFinding& f);
MutationFinding finding_from_json(const nlohmann::json& j);

nlohmann::ordered_json findings_to_json(const std::vector<MutationFinding>& findings);

}  // namespace tracelens
