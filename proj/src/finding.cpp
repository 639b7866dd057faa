#include "tracelens/finding.hpp"

#include <array>

#include "tracelens/error.hpp"

namespace tracelens {
namespace {

constexpr std::array<std::pair<MutationSubtype, std::string_view>, 5> kSubtypes = {{
    {MutationSubtype::SemioticReversal_NegationLoss, "SemioticReversal_NegationLoss"},
    {MutationSubtype::SemioticReversal_GeneratedNegation, "SemioticReversal_GeneratedNegation"},
    {MutationSubtype::ScopeCollapse, "ScopeCollapse"},
    {MutationSubtype::ResidualUserOwnership, "ResidualUserOwnership"},
    {MutationSubtype::ProjectiveReassignment, "ProjectiveReassignment"},
}};

nlohmann::ordered_json span_json(Span s) { return nlohmann::ordered_json::array({s.begin, s.end}); }

Span span_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("span must be [begin, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

nlohmann::ordered_json ref_json(const TraceRef& r) {
  nlohmann::ordered_json j;
  j["turn"] = r.turn;
  j["span"] = span_json(r.span);
  j["text"] = r.text;
  j["trace"] = r.trace;
  return j;
}

TraceRef ref_from(const nlohmann::json& j) {
  return {j.at("trace").get<std::string>(), j.at("turn").get<std::size_t>(), span_from(j.at("span")),
          j.at("text").get<std::string>()};
}

MatchKind match_kind_from(std::string_view s) {
  for (auto k : {MatchKind::Quotation, MatchKind::NearQuotation, MatchKind::Restatement})
    if (to_string(k) == s) return k;
  throw ParseError("unknown match kind '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(MutationClass c) {
  return c == MutationClass::UtteranceEffacement ? "UtteranceEffacement" : "GenitiveDissociation";
}

std::string_view to_string(MutationSubtype s) {
  for (const auto& [v, name] : kSubtypes)
    if (v == s) return name;
  return "?";
}

std::string_view to_string(Severity s) { return s == Severity::Inversion ? "Inversion" : "Distortion"; }

MutationClass mutation_class_from_string(std::string_view s) {
  if (s == "UtteranceEffacement") return MutationClass::UtteranceEffacement;
  if (s == "GenitiveDissociation") return MutationClass::GenitiveDissociation;
  throw ParseError("unknown mutation class '" + std::string(s) + "'");
}

MutationSubtype mutation_subtype_from_string(std::string_view s) {
  for (const auto& [v, name] : kSubtypes)
    if (name == s) return v;
  throw ParseError("unknown mutation subtype '" + std::string(s) + "'");
}

Severity severity_from_string(std::string_view s) {
  if (s == "Inversion") return Severity::Inversion;
  if (s == "Distortion") return Severity::Distortion;
  throw ParseError("unknown severity '" + std::string(s) + "'");
}

MutationClass class_of(MutationSubtype s) {
  switch (s) {
    case MutationSubtype::SemioticReversal_NegationLoss:
    case MutationSubtype::SemioticReversal_GeneratedNegation:
    case MutationSubtype::ScopeCollapse:
      return MutationClass::UtteranceEffacement;
    case MutationSubtype::ResidualUserOwnership:
    case MutationSubtype::ProjectiveReassignment:
      break;
  }
  return MutationClass::GenitiveDissociation;
}

Severity severity_of(MutationSubtype s) {
  return s == MutationSubtype::SemioticReversal_NegationLoss || s == MutationSubtype::SemioticReversal_GeneratedNegation
             ? Severity::Inversion
             : Severity::Distortion;
}

TraceRef make_ref(const TraceGraph& graph, const Trace& t) {
  return {t.id, t.turn_index, t.span, std::string(graph.text_of(t))};
}

nlohmann::ordered_json to_json(const MutationFinding& f) {
  nlohmann::ordered_json j;
  j["class"] = to_string(f.mutation_class);
  j["subtype"] = to_string(f.subtype);
  j["severity"] = to_string(f.severity);
  j["origin"] = ref_json(f.origin);
  j["recapitulant"] = ref_json(f.recapitulant);
  if (f.link) {
    nlohmann::ordered_json l;
    l["match_kind"] = to_string(f.link->match_kind);
    l["match_score"] = f.link->match_score;
    j["link"] = l;
  }
  j["evidence"] = nlohmann::ordered_json::array();
  for (const auto& e : f.evidence) {
    nlohmann::ordered_json ej;
    ej["feature"] = e.feature;
    ej["origin_value"] = e.origin_value;
    ej["recap_value"] = e.recap_value;
    ej["origin_span"] = span_json(e.origin_span);
    ej["recap_span"] = span_json(e.recap_span);
    ej["origin_text"] = e.origin_text;
    ej["recap_text"] = e.recap_text;
    j["evidence"].push_back(ej);
  }
  return j;
}

MutationFinding finding_from_json(const nlohmann::json& j) {
  try {
    MutationFinding f;
    f.mutation_class = mutation_class_from_string(j.at("class").get<std::string>());
    f.subtype = mutation_subtype_from_string(j.at("subtype").get<std::string>());
    f.severity = severity_from_string(j.at("severity").get<std::string>());
    f.origin = ref_from(j.at("origin"));
    f.recapitulant = ref_from(j.at("recapitulant"));
    if (j.contains("link"))
      f.link = TraceLink{f.recapitulant.trace, f.origin.trace, j["link"].at("match_score").get<double>(),
                         match_kind_from(j["link"].at("match_kind").get<std::string>())};
    for (const auto& ej : j.at("evidence"))
      f.evidence.push_back({ej.at("feature").get<std::string>(), ej.at("origin_value").get<std::string>(),
                            ej.at("recap_value").get<std::string>(), span_from(ej.at("origin_span")),
                            span_from(ej.at("recap_span")), ej.at("origin_text").get<std::string>(),
                            ej.at("recap_text").get<std::string>()});
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed finding: ") + e.what());
  }
}

nlohmann::ordered_json findings_to_json(const std::vector<MutationFinding>& findings) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : findings) arr.push_back(to_json(f));
  return arr;
}

}  // namespace tracelens
