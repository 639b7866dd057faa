#include "tracelens/fixture.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "tracelens/error.hpp"
#include "tracelens/provider.hpp"

namespace tracelens {
namespace {

// Turn at which each level is first judged true; absent levels stay false.
struct Schedule {
  std::size_t j1 = 0;
  std::optional<std::size_t> j2;
  std::optional<std::size_t> j3;
};

Schedule schedule_for(const FixtureOutcome& o) {
  Schedule s;
  s.j1 = o.anomaly ? 0 : 1;
  const std::size_t T = o.tte;
  switch (o.locus) {
    case Locus::Independent: s.j2 = s.j1; break;
    case Locus::Prompted: s.j2 = s.j1 + 1; break;
    case Locus::Unreached:
      if (T < s.j1 + 1) throw ValidationError("unreached session needs tte >= " + std::to_string(s.j1 + 1));
      return s;
  }
  // L2 and L3 both on the baseline would be a baseline inversion.
  if (T < std::max<std::size_t>(*s.j2, 1))
    throw ValidationError("tte " + std::to_string(T) + " too small for locus " + std::string(to_string(o.locus)));
  s.j3 = T;
  return s;
}

std::vector<std::string> numbered(const std::string& stem, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(stem + " " + std::to_string(i) + ".");
  return out;
}

class ScheduleJudge : public Judge {
 public:
  ScheduleJudge(Schedule s, bool human_exp) : s_(s), human_exp_(human_exp) {}

  bool verdict(const LadderState& state, Level level, const std::string&) override {
    const auto t = state.socratic_turns;
    switch (level) {
      case Level::AnomalyDetection: return t >= s_.j1;
      case Level::LocusIdentification: return s_.j2 && t >= *s_.j2;
      case Level::DegenerationCharacterization: break;
    }
    return s_.j3 && t >= *s_.j3;
  }
  bool human_experience(const LadderState&, const std::string&) override { return human_exp_; }

 private:
  Schedule s_;
  bool human_exp_;
};

}  // namespace

SessionScores FixtureOutcome::expected_scores() const {
  SessionScores s;
  s.anomaly = anomaly;
  s.locus = locus;
  s.characterization = characterization();
  s.human_exp = human_exp;
  s.tte = tte;
  s.baseline_inversion = false;
  return s;
}

FixtureCorpus fixture_from_json(const nlohmann::json& j) {
  try {
    FixtureCorpus c;
    c.provider_id = j.value("provider_id", "fixture");
    c.exhibit_id = j.at("exhibit_id").get<std::string>();
    for (const auto& s : j.at("sessions")) {
      FixtureOutcome o;
      o.model = s.at("model").get<std::string>();
      o.anomaly = s.at("anomaly").get<bool>();
      o.locus = locus_from_string(s.at("locus").get<std::string>());
      o.human_exp = s.at("human_exp").get<bool>();
      o.tte = s.at("tte").get<std::size_t>();
      c.sessions.push_back(std::move(o));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fixture: ") + e.what());
  }
}

FixtureCorpus load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  try {
    return fixture_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

LadderPlan fixture_plan(const FixtureOutcome& o) {
  const auto s = schedule_for(o);
  std::size_t d2 = 1, d3 = 1;
  if (o.locus == Locus::Unreached) {
    d2 = o.tte - s.j1;
  } else {
    // Independent needs the pointing prompt left unissued; prompted needs it
    // to be the one that lands.
    d2 = o.locus == Locus::Independent ? *s.j2 - s.j1 + 1 : *s.j2 - s.j1;
    d3 = std::max<std::size_t>(1, *s.j3 - *s.j2);
  }
  LadderPlan p;
  p.baseline_prompt = "[fixture] baseline prompt; text not encoded.";
  p.escalation[0] = numbered("[fixture] anomaly prompt", std::max<std::size_t>(1, s.j1));
  p.escalation[1] = numbered("[fixture] locus prompt", d2);
  p.escalation[2] = numbered("[fixture] characterization prompt", d3);
  p.reveal_prompt = "[fixture] reveal prompt.";
  p.mechanism_prompt = "[fixture] mechanism prompt.";
  p.human_experience_prompt = "[fixture] human experience prompt.";
  return p;
}

GeneratedSession generate_session(const FixtureOutcome& outcome, const std::string& session_id,
                                  const std::string& provider_id, const std::string& exhibit_id, Clock clock) {
  const auto plan = fixture_plan(outcome);
  std::vector<std::string> replies;
  for (std::size_t i = 0; i < outcome.tte + 3; ++i)
    replies.push_back("[fixture] response " + std::to_string(i) + "; text not encoded.");
  auto provider = ScriptedProvider::from_replies(replies);
  SessionDriver driver(session_id, exhibit_id, plan, ModelRef{provider_id, outcome.model, {}}, *provider,
                       std::move(clock));
  ScheduleJudge judge(schedule_for(outcome), outcome.human_exp);
  if (run_with_judge(driver, judge) != DriverStatus::Closed)
    throw ValidationError("fixture session " + session_id + " did not close");
  if (*driver.scores() != outcome.expected_scores())
    throw ValidationError("fixture session " + session_id + " scored differently from its outcome");
  return {driver.record(), driver.events()};
}

std::vector<GeneratedSession> generate_corpus(const FixtureCorpus& corpus, Clock clock) {
  std::vector<GeneratedSession> out;
  for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "api-%02zu", i + 1);
    out.push_back(generate_session(corpus.sessions[i], id, corpus.provider_id, corpus.exhibit_id, clock));
  }
  return out;
}

void write_fixture_store(const FixtureCorpus& corpus, Store& store, Clock clock) {
  for (const auto& g : generate_corpus(corpus, std::move(clock))) store.append_session(g.record, g.events);
}

}  // namespace tracelens
