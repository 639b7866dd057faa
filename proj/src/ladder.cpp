#include "tracelens/ladder.hpp"

#include "tracelens/error.hpp"
#include "tracelens/text.hpp"

namespace tracelens {
namespace {

[[noreturn]] void illegal(const LadderState& s, std::string_view op) {
  throw IllegalTransition(std::string(op) + " is not allowed in phase " + phase_name(s.phase));
}

bool blank(const std::string& s) { return text::trim(s, {0, s.size()}).empty(); }

HistoryEntry entry(const LadderState& s, const std::string& response) {
  return {s.current_prompt, response, {}, blank(response)};
}

void issue(LadderState& s, std::string prompt) {
  s.current_prompt = std::move(prompt);
  s.awaiting_response = true;
}

Level next_level(Level l) { return static_cast<Level>(index_of(l) + 1); }

}  // namespace

LadderPlan plan_from_exhibit(const Exhibit& e) {
  validate(e);
  return {baseline_prompt(e), e.escalation_prompts, e.reveal_prompt, e.mechanism_prompt, e.human_experience_prompt};
}

void validate(const LadderPlan& p) {
  std::vector<std::string> missing;
  if (blank(p.baseline_prompt)) missing.emplace_back("baseline_prompt");
  for (auto l : kLevels)
    if (p.escalation[index_of(l)].empty()) missing.push_back("escalation." + std::string(to_string(l)));
  if (blank(p.reveal_prompt)) missing.emplace_back("reveal_prompt");
  if (blank(p.mechanism_prompt)) missing.emplace_back("mechanism_prompt");
  if (blank(p.human_experience_prompt)) missing.emplace_back("human_experience_prompt");
  if (missing.empty()) return;
  std::string msg = "invalid ladder plan: missing ";
  for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
  throw ValidationError(msg);
}

nlohmann::ordered_json to_json(const LadderPlan& p) {
  nlohmann::ordered_json j;
  j["baseline_prompt"] = p.baseline_prompt;
  nlohmann::ordered_json esc;
  for (auto l : kLevels) esc[std::string(to_string(l))] = p.escalation[index_of(l)];
  j["escalation"] = esc;
  j["reveal_prompt"] = p.reveal_prompt;
  j["mechanism_prompt"] = p.mechanism_prompt;
  j["human_experience_prompt"] = p.human_experience_prompt;
  return j;
}

LadderPlan plan_from_json(const nlohmann::json& j) {
  try {
    LadderPlan p;
    p.baseline_prompt = j.at("baseline_prompt").get<std::string>();
    for (auto l : kLevels)
      p.escalation[index_of(l)] = j.at("escalation").at(std::string(to_string(l))).get<std::vector<std::string>>();
    p.reveal_prompt = j.at("reveal_prompt").get<std::string>();
    p.mechanism_prompt = j.at("mechanism_prompt").get<std::string>();
    p.human_experience_prompt = j.at("human_experience_prompt").get<std::string>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed plan: ") + e.what());
  }
}

std::string phase_name(const Phase& p) {
  if (std::holds_alternative<phase::Baseline>(p)) return "baseline";
  if (const auto* s = std::get_if<phase::Socratic>(&p)) return "socratic/" + std::string(to_string(s->level));
  if (std::holds_alternative<phase::Reveal>(p)) return "reveal";
  if (const auto* g = std::get_if<phase::Gestalt>(&p))
    return g->stage == phase::GestaltStage::Mechanism ? "gestalt/mechanism" : "gestalt/human_experience";
  return "closed";
}

std::array<std::size_t, 3> phase_order(const Phase& p) {
  if (const auto* s = std::get_if<phase::Socratic>(&p)) return {1, index_of(s->level), s->step};
  if (std::holds_alternative<phase::Reveal>(p)) return {2, 0, 0};
  if (const auto* g = std::get_if<phase::Gestalt>(&p)) return {3, static_cast<std::size_t>(g->stage), 0};
  if (std::holds_alternative<phase::Closed>(p)) return {4, 0, 0};
  return {0, 0, 0};
}

std::string_view to_string(Locus l) {
  switch (l) {
    case Locus::Independent: return "independent";
    case Locus::Prompted: return "prompted";
    case Locus::Unreached: break;
  }
  return "unreached";
}

Locus locus_from_string(std::string_view s) {
  for (auto l : {Locus::Independent, Locus::Prompted, Locus::Unreached})
    if (to_string(l) == s) return l;
  throw ParseError("unknown locus '" + std::string(s) + "'");
}

nlohmann::ordered_json to_json(const SessionScores& s) {
  nlohmann::ordered_json j;
  j["anomaly"] = s.anomaly;
  j["locus"] = to_string(s.locus);
  j["characterization"] = s.characterization;
  j["human_exp"] = s.human_exp;
  j["tte"] = s.tte;
  j["baseline_inversion"] = s.baseline_inversion;
  return j;
}

SessionScores scores_from_json(const nlohmann::json& j) {
  try {
    SessionScores s;
    s.anomaly = j.at("anomaly").get<bool>();
    s.locus = locus_from_string(j.at("locus").get<std::string>());
    s.characterization = j.at("characterization").get<bool>();
    s.human_exp = j.at("human_exp").get<bool>();
    s.tte = j.at("tte").get<std::size_t>();
    s.baseline_inversion = j.value("baseline_inversion", false);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scores: ") + e.what());
  }
}

LadderState start_session(const LadderPlan& plan) {
  validate(plan);
  LadderState s;
  s.plan = plan;
  issue(s, plan.baseline_prompt);
  return s;
}

LadderState start_session(const Exhibit& exhibit) { return start_session(plan_from_exhibit(exhibit)); }

LadderState record_baseline(const LadderState& in, const std::string& response) {
  if (!std::holds_alternative<phase::Baseline>(in.phase) || !in.awaiting_response) illegal(in, "record_baseline");
  LadderState s = in;
  s.history.push_back(entry(s, response));
  s.awaiting_response = false;
  s.current_prompt.clear();
  s.phase = phase::Socratic{Level::AnomalyDetection, 0};
  s.pending = PendingJudgment{Level::AnomalyDetection, s.history.size() - 1};
  return s;
}

LadderState apply_judgment(const LadderState& in, bool verdict) {
  const auto* soc = std::get_if<phase::Socratic>(&in.phase);
  if (!soc || !in.pending) illegal(in, "apply_judgment");
  LadderState s = in;
  const Level level = s.pending->level;
  const std::size_t li = index_of(level);
  s.history[s.pending->history_index].judgments.push_back({level, verdict});

  if (verdict) {
    s.level_outcomes[li] = {true, soc->step, s.socratic_turns};
    if (level != Level::DegenerationCharacterization) {
      // The same response is judged against the next level before any prompt.
      const Level next = next_level(level);
      s.phase = phase::Socratic{next, 0};
      s.pending = PendingJudgment{next, s.pending->history_index};
    } else {
      s.pending.reset();
      s.tte_mark = s.socratic_turns;
      s.phase = phase::Gestalt{phase::GestaltStage::Mechanism};
      issue(s, s.plan.mechanism_prompt);
    }
    return s;
  }

  s.pending.reset();
  const auto& prompts = s.plan.escalation[li];
  if (s.prompts_issued[li] < prompts.size()) {
    issue(s, prompts[s.prompts_issued[li]]);
    ++s.prompts_issued[li];
    if (level == Level::LocusIdentification && s.prompts_issued[li] == prompts.size()) s.pointing_used = true;
    s.phase = phase::Socratic{level, soc->step + 1};
  } else {
    s.phase = phase::Reveal{};
    s.revealed = true;
    s.tte_mark = s.socratic_turns;
    s.current_prompt.clear();
  }
  return s;
}

LadderState record_subject_turn(const LadderState& in, const std::string& response) {
  if (!in.awaiting_response || in.pending) illegal(in, "record_subject_turn");
  LadderState s = in;
  if (const auto* soc = std::get_if<phase::Socratic>(&s.phase)) {
    s.history.push_back(entry(s, response));
    ++s.socratic_turns;
    s.pending = PendingJudgment{soc->level, s.history.size() - 1};
    s.awaiting_response = false;
    s.current_prompt.clear();
    return s;
  }
  if (const auto* g = std::get_if<phase::Gestalt>(&s.phase)) {
    s.history.push_back(entry(s, response));
    if (g->stage == phase::GestaltStage::Mechanism) {
      s.phase = phase::Gestalt{phase::GestaltStage::HumanExperience};
      issue(s, s.plan.human_experience_prompt);
    } else {
      s.phase = phase::Closed{};
      s.awaiting_response = false;
      s.current_prompt.clear();
    }
    return s;
  }
  illegal(in, "record_subject_turn");
}

LadderState run_gestalt(const LadderState& in) {
  if (std::holds_alternative<phase::Reveal>(in.phase)) {
    LadderState s = in;
    s.phase = phase::Gestalt{phase::GestaltStage::Mechanism};
    issue(s, s.plan.reveal_prompt + "\n\n" + s.plan.mechanism_prompt);
    return s;
  }
  const auto* g = std::get_if<phase::Gestalt>(&in.phase);
  if (g && g->stage == phase::GestaltStage::Mechanism && in.awaiting_response) return in;
  illegal(in, "run_gestalt");
}

bool is_closed(const LadderState& s) { return std::holds_alternative<phase::Closed>(s.phase); }

SessionScores score_session(const LadderState& s, bool human_exp_verdict) {
  if (!is_closed(s)) illegal(s, "score_session");
  SessionScores out;
  auto baseline_met = [&](Level l) {
    if (s.history.empty()) return false;
    for (const auto& j : s.history.front().judgments)
      if (j.level == l && j.verdict) return true;
    return false;
  };
  out.anomaly = baseline_met(Level::AnomalyDetection);
  if (s.level_outcomes[index_of(Level::LocusIdentification)].achieved)
    out.locus = s.pointing_used ? Locus::Prompted : Locus::Independent;
  else
    out.locus = Locus::Unreached;
  out.characterization = s.level_outcomes[index_of(Level::DegenerationCharacterization)].achieved;
  out.human_exp = human_exp_verdict;
  out.tte = s.tte_mark.value_or(s.socratic_turns);
  out.baseline_inversion = baseline_met(Level::LocusIdentification) && baseline_met(Level::DegenerationCharacterization);
  return out;
}

nlohmann::ordered_json to_json(const LadderState& s) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json ph;
  ph["name"] = phase_name(s.phase);
  if (const auto* soc = std::get_if<phase::Socratic>(&s.phase)) {
    ph["level"] = to_string(soc->level);
    ph["step"] = soc->step;
  }
  j["phase"] = ph;
  j["history"] = nlohmann::ordered_json::array();
  for (const auto& h : s.history) {
    nlohmann::ordered_json e;
    e["prompt"] = h.prompt;
    e["response"] = h.response;
    e["judgments"] = nlohmann::ordered_json::array();
    for (const auto& jd : h.judgments) e["judgments"].push_back({{"level", to_string(jd.level)}, {"verdict", jd.verdict}});
    e["empty_response"] = h.empty_response;
    j["history"].push_back(e);
  }
  j["socratic_turns"] = s.socratic_turns;
  j["pointing_used"] = s.pointing_used;
  nlohmann::ordered_json outcomes;
  for (auto l : kLevels) {
    const auto& o = s.level_outcomes[index_of(l)];
    outcomes[std::string(to_string(l))] = {{"achieved", o.achieved}, {"at_step", o.at_step}, {"at_turn", o.at_turn}};
  }
  j["level_outcomes"] = outcomes;
  j["prompts_issued"] = s.prompts_issued;
  if (s.pending)
    j["pending"] = {{"level", to_string(s.pending->level)}, {"history_index", s.pending->history_index}};
  else
    j["pending"] = nullptr;
  j["awaiting_response"] = s.awaiting_response;
  j["current_prompt"] = s.current_prompt;
  j["revealed"] = s.revealed;
  j["tte_mark"] = s.tte_mark ? nlohmann::ordered_json(*s.tte_mark) : nlohmann::ordered_json(nullptr);
  j["plan"] = to_json(s.plan);
  return j;
}

std::uint64_t state_hash(const LadderState& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_json(s).dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace tracelens
