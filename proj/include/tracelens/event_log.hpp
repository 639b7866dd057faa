#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelens/ladder.hpp"

namespace tracelens {

namespace event_kind {
inline constexpr std::string_view kSessionStarted = "session_started";
inline constexpr std::string_view kPromptIssued = "prompt_issued";
inline constexpr std::string_view kSubjectResponse = "subject_response";
inline constexpr std::string_view kJudgment = "judgment";
inline constexpr std::string_view kGestaltStarted = "gestalt_started";
inline constexpr std::string_view kHumanExpVerdict = "human_exp_verdict";
inline constexpr std::string_view kProviderError = "provider_error";
inline constexpr std::string_view kSessionAborted = "session_aborted";
inline constexpr std::string_view kSessionClosed = "session_closed";
}  // namespace event_kind

struct Event {
  std::string ts;
  std::string session_id;
  std::string event_kind;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  bool operator==(const Event&) const = default;
};

// Returns an ISO-8601 UTC timestamp. Injected so logs can be made
// byte-reproducible in tests.
using Clock = std::function<std::string()>;
Clock system_clock();
Clock fixed_clock(std::string ts);

std::string to_line(const Event& e);
Event event_from_line(std::string_view line, std::size_t line_no = 0);

void write_events(std::ostream& out, const std::vector<Event>& events);
std::vector<Event> read_events(std::istream& in);

struct ReplayResult {
  std::string session_id;
  std::string exhibit_id;
  std::string model;
  LadderState state;
  bool aborted = false;
  std::optional<bool> human_exp;
  std::optional<SessionScores> scores;  // present once the session closed
};

// Rebuilds the ladder from a log. Throws ValidationError when the log is not
// a legal sequence or its recorded prompts/scores disagree with the engine.
ReplayResult replay(const std::vector<Event>& events);

// Events with timestamps blanked, for comparisons that ignore wall time.
std::vector<Event> without_timestamps(std::vector<Event> events);

}  // namespace tracelens
