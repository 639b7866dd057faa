#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracelens/event_log.hpp"
#include "tracelens/exhibit.hpp"
#include "tracelens/ladder.hpp"
#include "tracelens/provider.hpp"

namespace tracelens {

enum class SessionStatus { Running, Closed, Aborted };
std::string_view to_string(SessionStatus s);
SessionStatus session_status_from_string(std::string_view s);

struct SessionRecord {
  std::string session_id;
  ModelRef model;
  std::string exhibit_id;
  std::string event_log;  // path relative to the store root
  SessionStatus status = SessionStatus::Closed;
  std::optional<SessionScores> scores;
  std::string notes;

  bool operator==(const SessionRecord&) const = default;
};

nlohmann::ordered_json to_json(const SessionRecord& r);
SessionRecord record_from_json(const nlohmann::json& j);

enum class DriverStatus { NeedsJudgment, NeedsHumanExperience, Closed, Aborted };
std::string_view to_string(DriverStatus s);

// Runs one elicitation session: issues prompts through a provider, records
// every step as an event, and stops whenever a human decision is needed.
// Not thread-safe; callers serialize access per session.
class SessionDriver {
 public:
  SessionDriver(std::string session_id, const Exhibit& exhibit, ModelRef model, Provider& provider,
                Clock clock = system_clock());
  SessionDriver(std::string session_id, std::string exhibit_id, LadderPlan plan, ModelRef model, Provider& provider,
                Clock clock = system_clock());

  // Talks to the provider until a verdict is required or the session ends.
  DriverStatus pump();
  DriverStatus status() const;

  // Token naming the pending judgment, "h<history index>:L<level>".
  std::optional<std::string> pending_token() const;
  // Throws IllegalTransition if nothing is pending or the token is stale.
  void judge(bool verdict, const std::optional<std::string>& token = std::nullopt);
  void judge_human_experience(bool verdict);

  const std::string& session_id() const { return session_id_; }
  const std::string& exhibit_id() const { return exhibit_id_; }
  const ModelRef& model() const { return model_; }
  const LadderState& state() const { return state_; }
  const std::vector<Event>& events() const { return events_; }
  const std::optional<SessionScores>& scores() const { return scores_; }
  const std::string& abort_reason() const { return abort_reason_; }
  SessionRecord record() const;

 private:
  void emit(std::string_view kind, nlohmann::ordered_json payload = nlohmann::ordered_json::object());
  ChatRequest build_request() const;

  std::string session_id_;
  std::string exhibit_id_;
  ModelRef model_;
  Provider& provider_;
  Clock clock_;
  LadderState state_;
  std::vector<Event> events_;
  std::optional<bool> human_exp_;
  std::optional<SessionScores> scores_;
  bool aborted_ = false;
  std::string abort_reason_;
};

// Source of human verdicts for a driver run to completion in-process.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual bool verdict(const LadderState& state, Level level, const std::string& response) = 0;
  virtual bool human_experience(const LadderState& state, const std::string& response) = 0;
};

// Verdicts from a fixed sequence; the last entry answers the human-experience
// question. Throws ValidationError when the sequence runs out.
class ScriptedJudge : public Judge {
 public:
  explicit ScriptedJudge(std::vector<bool> verdicts);
  // "yynny" style; 'y'/'1'/'t' true, 'n'/'0'/'f' false, other chars ignored.
  static ScriptedJudge parse(std::string_view verdicts);

  bool verdict(const LadderState& state, Level level, const std::string& response) override;
  bool human_experience(const LadderState& state, const std::string& response) override;

 private:
  bool next();
  std::vector<bool> verdicts_;
  std::size_t pos_ = 0;
};

// Interactive y/n prompts.
class TerminalJudge : public Judge {
 public:
  TerminalJudge(std::istream& in, std::ostream& out, std::string canonical_human_experience = {});
  bool verdict(const LadderState& state, Level level, const std::string& response) override;
  bool human_experience(const LadderState& state, const std::string& response) override;

 private:
  bool ask(const std::string& question);
  std::istream& in_;
  std::ostream& out_;
  std::string canonical_;
};

// Pumps the driver and feeds it the judge's verdicts until it stops.
DriverStatus run_with_judge(SessionDriver& driver, Judge& judge);

}  // namespace tracelens
