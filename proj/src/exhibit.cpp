#include "tracelens/exhibit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tracelens/error.hpp"
#include "tracelens/trace.hpp"

namespace tracelens {
namespace {

constexpr std::array<std::string_view, 3> kLevelNames = {"anomaly_detection", "locus_identification",
                                                         "degeneration_characterization"};

bool blank(const std::string& s) { return text::trim(s, {0, s.size()}).empty(); }

std::string get_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) throw ParseError(std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

}  // namespace

std::string_view to_string(Level l) { return kLevelNames[index_of(l)]; }

Level level_from_string(std::string_view s) {
  for (auto l : kLevels)
    if (to_string(l) == s) return l;
  if (s == "1" || s == "L1") return Level::AnomalyDetection;
  if (s == "2" || s == "L2") return Level::LocusIdentification;
  if (s == "3" || s == "L3") return Level::DegenerationCharacterization;
  throw ParseError("unknown level '" + std::string(s) + "'");
}

void validate(const Exhibit& e) {
  std::vector<std::string> problems;
  auto need = [&](const std::string& value, const char* name) {
    if (blank(value)) problems.emplace_back(name);
  };
  need(e.id, "id");
  need(e.framing_prompt, "framing_prompt");
  need(e.canonical_anomaly, "canonical_anomaly");
  need(e.canonical_degeneration, "canonical_degeneration");
  need(e.canonical_human_experience, "canonical_human_experience");
  need(e.reveal_prompt, "reveal_prompt");
  need(e.mechanism_prompt, "mechanism_prompt");
  need(e.human_experience_prompt, "human_experience_prompt");
  if (e.exchange.empty()) problems.emplace_back("exchange");
  for (auto l : kLevels) {
    const auto& prompts = e.escalation_prompts[index_of(l)];
    if (prompts.empty()) problems.push_back("escalation_prompts." + std::string(to_string(l)));
    for (const auto& p : prompts)
      if (blank(p)) problems.push_back("escalation_prompts." + std::string(to_string(l)) + " (blank prompt)");
  }
  if (!e.exchange.empty()) {
    const auto traces = build_traces(e.exchange);
    for (const auto* id : {&e.canonical_locus.origin, &e.canonical_locus.recapitulant}) {
      const bool found = std::any_of(traces.begin(), traces.end(), [&](const Trace& t) { return t.id == *id; });
      if (!found) problems.push_back("canonical_locus (" + (id->empty() ? std::string("missing") : *id) + ")");
    }
  }
  if (problems.empty()) return;
  std::string msg = "invalid exhibit";
  if (!e.id.empty()) msg += " '" + e.id + "'";
  msg += ": missing or invalid ";
  for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? ", " : "") + problems[i];
  throw ValidationError(msg);
}

std::string baseline_prompt(const Exhibit& e) {
  std::ostringstream out;
  out << e.framing_prompt << "\n\n";
  for (const auto& turn : e.exchange.turns())
    out << (turn.speaker == Speaker::Human ? "Human: " : "LLM: ") << turn.text << "\n";
  return out.str();
}

nlohmann::ordered_json to_json(const Exhibit& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["framing_prompt"] = e.framing_prompt;
  j["exchange"] = nlohmann::ordered_json::array();
  for (const auto& t : e.exchange.turns()) j["exchange"].push_back(to_json(t));
  j["canonical_locus"] = {{"origin", e.canonical_locus.origin}, {"recapitulant", e.canonical_locus.recapitulant}};
  j["canonical_anomaly"] = e.canonical_anomaly;
  j["canonical_degeneration"] = e.canonical_degeneration;
  j["canonical_human_experience"] = e.canonical_human_experience;
  nlohmann::ordered_json prompts;
  for (auto l : kLevels) prompts[std::string(to_string(l))] = e.escalation_prompts[index_of(l)];
  j["escalation_prompts"] = prompts;
  j["reveal_prompt"] = e.reveal_prompt;
  j["mechanism_prompt"] = e.mechanism_prompt;
  j["human_experience_prompt"] = e.human_experience_prompt;
  return j;
}

Exhibit exhibit_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("exhibit must be an object");
  Exhibit e;
  e.id = get_string(j, "id");
  e.framing_prompt = get_string(j, "framing_prompt");
  if (j.contains("exchange")) {
    if (!j["exchange"].is_array()) throw ParseError("'exchange' must be an array of turns");
    std::vector<Turn> turns;
    for (const auto& t : j["exchange"]) turns.push_back(turn_from_json(t));
    e.exchange = Transcript(e.id, std::move(turns));
  }
  if (j.contains("canonical_locus")) {
    const auto& l = j["canonical_locus"];
    e.canonical_locus = {get_string(l, "origin"), get_string(l, "recapitulant")};
  }
  e.canonical_anomaly = get_string(j, "canonical_anomaly");
  e.canonical_degeneration = get_string(j, "canonical_degeneration");
  e.canonical_human_experience = get_string(j, "canonical_human_experience");
  if (j.contains("escalation_prompts")) {
    const auto& p = j["escalation_prompts"];
    if (!p.is_object()) throw ParseError("'escalation_prompts' must be an object keyed by level");
    for (auto l : kLevels) {
      const std::string key(to_string(l));
      if (!p.contains(key)) continue;
      if (!p[key].is_array()) throw ParseError("escalation_prompts." + key + " must be an array");
      for (const auto& s : p[key]) {
        if (!s.is_string()) throw ParseError("escalation_prompts." + key + " entries must be strings");
        e.escalation_prompts[index_of(l)].push_back(s.get<std::string>());
      }
    }
  }
  e.reveal_prompt = get_string(j, "reveal_prompt");
  e.mechanism_prompt = get_string(j, "mechanism_prompt");
  e.human_experience_prompt = get_string(j, "human_experience_prompt");
  return e;
}

Exhibit load_exhibit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  auto e = exhibit_from_json(j);
  validate(e);
  return e;
}

}  // namespace tracelens
