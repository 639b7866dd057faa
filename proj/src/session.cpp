#include "tracelens/session.hpp"

#include <istream>
#include <ostream>

#include "tracelens/error.hpp"
#include "tracelens/text.hpp"

namespace tracelens {

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running: return "running";
    case SessionStatus::Closed: return "closed";
    case SessionStatus::Aborted: break;
  }
  return "aborted";
}

SessionStatus session_status_from_string(std::string_view s) {
  for (auto v : {SessionStatus::Running, SessionStatus::Closed, SessionStatus::Aborted})
    if (to_string(v) == s) return v;
  throw ParseError("unknown session status '" + std::string(s) + "'");
}

nlohmann::ordered_json to_json(const SessionRecord& r) {
  nlohmann::ordered_json j;
  j["session_id"] = r.session_id;
  j["model"] = to_json(r.model);
  j["exhibit_id"] = r.exhibit_id;
  j["event_log"] = r.event_log;
  j["status"] = to_string(r.status);
  j["scores"] = r.scores ? to_json(*r.scores) : nlohmann::ordered_json(nullptr);
  j["notes"] = r.notes;
  return j;
}

SessionRecord record_from_json(const nlohmann::json& j) {
  try {
    SessionRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.model = model_ref_from_json(j.at("model"));
    r.exhibit_id = j.at("exhibit_id").get<std::string>();
    r.event_log = j.at("event_log").get<std::string>();
    r.status = session_status_from_string(j.at("status").get<std::string>());
    if (j.contains("scores") && !j["scores"].is_null()) r.scores = scores_from_json(j["scores"]);
    r.notes = j.value("notes", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed session record: ") + e.what());
  }
}

std::string_view to_string(DriverStatus s) {
  switch (s) {
    case DriverStatus::NeedsJudgment: return "needs_judgment";
    case DriverStatus::NeedsHumanExperience: return "needs_human_experience";
    case DriverStatus::Closed: return "closed";
    case DriverStatus::Aborted: break;
  }
  return "aborted";
}

SessionDriver::SessionDriver(std::string session_id, const Exhibit& exhibit, ModelRef model, Provider& provider,
                             Clock clock)
    : SessionDriver(std::move(session_id), exhibit.id, plan_from_exhibit(exhibit), std::move(model), provider,
                    std::move(clock)) {}

SessionDriver::SessionDriver(std::string session_id, std::string exhibit_id, LadderPlan plan, ModelRef model,
                             Provider& provider, Clock clock)
    : session_id_(std::move(session_id)),
      exhibit_id_(std::move(exhibit_id)),
      model_(std::move(model)),
      provider_(provider),
      clock_(std::move(clock)),
      state_(start_session(plan)) {
  if (session_id_.empty()) throw ValidationError("session id must not be empty");
  nlohmann::ordered_json payload;
  payload["exhibit_id"] = exhibit_id_;
  payload["model"] = model_.str();
  payload["plan"] = to_json(state_.plan);
  emit(event_kind::kSessionStarted, std::move(payload));
}

void SessionDriver::emit(std::string_view kind, nlohmann::ordered_json payload) {
  events_.push_back({clock_(), session_id_, std::string(kind), std::move(payload)});
}

ChatRequest SessionDriver::build_request() const {
  ChatRequest req;
  req.request_id = session_id_ + ":" + std::to_string(state_.history.size());
  for (const auto& h : state_.history) {
    req.messages.push_back({Role::User, h.prompt});
    req.messages.push_back({Role::Assistant, h.response});
  }
  req.messages.push_back({Role::User, state_.current_prompt});
  return req;
}

DriverStatus SessionDriver::status() const {
  if (aborted_) return DriverStatus::Aborted;
  if (scores_) return DriverStatus::Closed;
  if (state_.pending) return DriverStatus::NeedsJudgment;
  if (is_closed(state_)) return DriverStatus::NeedsHumanExperience;
  return DriverStatus::NeedsJudgment;
}

DriverStatus SessionDriver::pump() {
  for (;;) {
    if (aborted_) return DriverStatus::Aborted;
    if (scores_) return DriverStatus::Closed;
    if (state_.awaiting_response) {
      const auto request = build_request();
      emit(event_kind::kPromptIssued, {{"text", state_.current_prompt}});
      ChatResponse response;
      try {
        response = provider_.complete(model_, request);
        check_complete(response);
      } catch (const ProviderError& e) {
        emit(event_kind::kProviderError, {{"kind", to_string(e.kind())}, {"message", e.what()}});
        emit(event_kind::kSessionAborted, {{"reason", e.what()}});
        aborted_ = true;
        abort_reason_ = e.what();
        return DriverStatus::Aborted;
      }
      nlohmann::ordered_json payload;
      payload["text"] = response.content;
      payload["finish_reason"] = response.finish_reason;
      payload["attempts"] = response.attempts;
      if (text::trim(response.content, {0, response.content.size()}).empty()) payload["empty"] = true;
      emit(event_kind::kSubjectResponse, std::move(payload));
      state_ = std::holds_alternative<phase::Baseline>(state_.phase) ? record_baseline(state_, response.content)
                                                                      : record_subject_turn(state_, response.content);
      continue;
    }
    if (state_.pending) return DriverStatus::NeedsJudgment;
    if (std::holds_alternative<phase::Reveal>(state_.phase)) {
      state_ = run_gestalt(state_);
      emit(event_kind::kGestaltStarted);
      continue;
    }
    if (is_closed(state_)) return DriverStatus::NeedsHumanExperience;
    throw IllegalTransition("session " + session_id_ + " stalled in phase " + phase_name(state_.phase));
  }
}

std::optional<std::string> SessionDriver::pending_token() const {
  if (aborted_ || !state_.pending) return std::nullopt;
  return "h" + std::to_string(state_.pending->history_index) + ":L" +
         std::to_string(index_of(state_.pending->level) + 1);
}

void SessionDriver::judge(bool verdict, const std::optional<std::string>& token) {
  const auto current = pending_token();
  if (!current) throw IllegalTransition("no response is pending judgment in session " + session_id_);
  if (token && *token != *current)
    throw IllegalTransition("judgment token " + *token + " is stale; pending is " + *current);
  const Level level = state_.pending->level;
  state_ = apply_judgment(state_, verdict);
  emit(event_kind::kJudgment, {{"level", to_string(level)}, {"verdict", verdict}});
}

void SessionDriver::judge_human_experience(bool verdict) {
  if (aborted_ || !is_closed(state_) || human_exp_)
    throw IllegalTransition("human-experience verdict not expected in session " + session_id_);
  human_exp_ = verdict;
  emit(event_kind::kHumanExpVerdict, {{"verdict", verdict}});
  scores_ = score_session(state_, verdict);
  emit(event_kind::kSessionClosed, {{"scores", to_json(*scores_)}});
}

SessionRecord SessionDriver::record() const {
  SessionRecord r;
  r.session_id = session_id_;
  r.model = model_;
  r.exhibit_id = exhibit_id_;
  r.event_log = "events/" + session_id_ + ".jsonl";
  r.status = aborted_ ? SessionStatus::Aborted : scores_ ? SessionStatus::Closed : SessionStatus::Running;
  r.scores = scores_;
  if (aborted_) {
    r.notes = "aborted: " + abort_reason_;
  } else if (is_closed(state_) && state_.history.size() >= 2) {
    r.notes = state_.history[state_.history.size() - 2].response;
  }
  return r;
}

ScriptedJudge::ScriptedJudge(std::vector<bool> verdicts) : verdicts_(std::move(verdicts)) {}

ScriptedJudge ScriptedJudge::parse(std::string_view verdicts) {
  std::vector<bool> v;
  for (char c : verdicts) {
    if (c == 'y' || c == 'Y' || c == '1' || c == 't' || c == 'T') v.push_back(true);
    else if (c == 'n' || c == 'N' || c == '0' || c == 'f' || c == 'F') v.push_back(false);
  }
  return ScriptedJudge(std::move(v));
}

bool ScriptedJudge::next() {
  if (pos_ >= verdicts_.size()) throw ValidationError("scripted verdicts exhausted");
  return verdicts_[pos_++];
}

bool ScriptedJudge::verdict(const LadderState&, Level, const std::string&) { return next(); }
bool ScriptedJudge::human_experience(const LadderState&, const std::string&) { return next(); }

TerminalJudge::TerminalJudge(std::istream& in, std::ostream& out, std::string canonical)
    : in_(in), out_(out), canonical_(std::move(canonical)) {}

bool TerminalJudge::ask(const std::string& question) {
  std::string line;
  for (;;) {
    out_ << question << " [y/n] " << std::flush;
    if (!std::getline(in_, line)) throw ValidationError("judge input ended");
    if (line == "y" || line == "Y" || line == "yes") return true;
    if (line == "n" || line == "N" || line == "no") return false;
  }
}

bool TerminalJudge::verdict(const LadderState&, Level level, const std::string& response) {
  out_ << "\n--- subject response ---\n" << response << "\n------------------------\n";
  return ask("Level " + std::to_string(index_of(level) + 1) + " (" + std::string(to_string(level)) + ") achieved?");
}

bool TerminalJudge::human_experience(const LadderState&, const std::string& response) {
  out_ << "\n--- predicted human experience ---\n" << response << "\n----------------------------------\n";
  if (!canonical_.empty()) out_ << "canonical: " << canonical_ << "\n";
  return ask("Matches the canonical human experience?");
}

DriverStatus run_with_judge(SessionDriver& driver, Judge& judge) {
  for (;;) {
    const auto st = driver.pump();
    const auto& s = driver.state();
    if (st == DriverStatus::NeedsJudgment) {
      const auto& pending = *s.pending;
      driver.judge(judge.verdict(s, pending.level, s.history[pending.history_index].response));
    } else if (st == DriverStatus::NeedsHumanExperience) {
      driver.judge_human_experience(judge.human_experience(s, s.history.back().response));
    } else {
      return st;
    }
  }
}

}  // namespace tracelens
