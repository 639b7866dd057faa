#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelens/event_log.hpp"
#include "tracelens/ladder.hpp"
#include "tracelens/session.hpp"
#include "tracelens/store.hpp"

namespace tracelens {

// Table-level outcome of one published session. Response texts are not part
// of the corpus, so generated sessions carry placeholder turns.
struct FixtureOutcome {
  std::string model;
  bool anomaly = false;
  Locus locus = Locus::Unreached;
  bool human_exp = false;
  std::size_t tte = 0;

  bool characterization() const { return locus != Locus::Unreached; }
  SessionScores expected_scores() const;
  bool operator==(const FixtureOutcome&) const = default;
};

struct FixtureCorpus {
  std::string provider_id = "fixture";
  std::string exhibit_id;
  std::vector<FixtureOutcome> sessions;
};

FixtureCorpus fixture_from_json(const nlohmann::json& j);
FixtureCorpus load_fixture(const std::filesystem::path& path);

// Escalation depths chosen so the verdict schedule lands on the outcome.
// Throws ValidationError for an outcome no session can produce.
LadderPlan fixture_plan(const FixtureOutcome& outcome);

struct GeneratedSession {
  SessionRecord record;
  std::vector<Event> events;
};

// Drives a real SessionDriver with scripted replies and verdicts and checks
// the resulting scores equal the outcome.
GeneratedSession generate_session(const FixtureOutcome& outcome, const std::string& session_id,
                                  const std::string& provider_id, const std::string& exhibit_id, Clock clock);
std::vector<GeneratedSession> generate_corpus(const FixtureCorpus& corpus, Clock clock);

// Appends every generated session to the store.
void write_fixture_store(const FixtureCorpus& corpus, Store& store, Clock clock);

}  // namespace tracelens
