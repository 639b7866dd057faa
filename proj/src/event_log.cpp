#include "tracelens/event_log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>

#include "tracelens/error.hpp"

namespace tracelens {

Clock system_clock() {
  return [] {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return std::string(out);
  };
}

Clock fixed_clock(std::string ts) {
  return [ts = std::move(ts)] { return ts; };
}

std::string to_line(const Event& e) {
  nlohmann::ordered_json j;
  j["ts"] = e.ts;
  j["session_id"] = e.session_id;
  j["event_kind"] = e.event_kind;
  j["payload"] = e.payload;
  return j.dump();
}

Event event_from_line(std::string_view line, std::size_t line_no) {
  try {
    const auto j = nlohmann::ordered_json::parse(line);
    Event e;
    e.ts = j.at("ts").get<std::string>();
    e.session_id = j.at("session_id").get<std::string>();
    e.event_kind = j.at("event_kind").get<std::string>();
    e.payload = j.value("payload", nlohmann::ordered_json::object());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed event: ") + ex.what(), line_no);
  }
}

void write_events(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& e : events) out << to_line(e) << '\n';
}

std::vector<Event> read_events(std::istream& in) {
  std::vector<Event> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    out.push_back(event_from_line(line, n));
  }
  return out;
}

ReplayResult replay(const std::vector<Event>& events) {
  if (events.empty() || events.front().event_kind != event_kind::kSessionStarted)
    throw ValidationError("event log must open with session_started");
  ReplayResult r;
  const auto& start = events.front();
  r.session_id = start.session_id;
  try {
    r.exhibit_id = start.payload.at("exhibit_id").get<std::string>();
    r.model = start.payload.at("model").get<std::string>();
    r.state = start_session(plan_from_json(start.payload.at("plan")));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed session_started: ") + e.what());
  }

  bool closed = false;
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string at = " (event " + std::to_string(i) + ")";
    if (e.session_id != r.session_id) throw ValidationError("event for a different session" + at);
    if (r.aborted || closed) throw ValidationError("event after session end" + at);
    try {
      if (e.event_kind == event_kind::kPromptIssued) {
        if (!r.state.awaiting_response || e.payload.at("text").get<std::string>() != r.state.current_prompt)
          throw ValidationError("logged prompt differs from the engine's" + at);
      } else if (e.event_kind == event_kind::kSubjectResponse) {
        const auto text = e.payload.at("text").get<std::string>();
        r.state = std::holds_alternative<phase::Baseline>(r.state.phase) ? record_baseline(r.state, text)
                                                                          : record_subject_turn(r.state, text);
      } else if (e.event_kind == event_kind::kJudgment) {
        const auto level = level_from_string(e.payload.at("level").get<std::string>());
        if (r.state.pending && r.state.pending->level != level)
          throw ValidationError("judgment names the wrong level" + at);
        r.state = apply_judgment(r.state, e.payload.at("verdict").get<bool>());
      } else if (e.event_kind == event_kind::kGestaltStarted) {
        r.state = run_gestalt(r.state);
      } else if (e.event_kind == event_kind::kHumanExpVerdict) {
        if (!is_closed(r.state) || r.human_exp) throw IllegalTransition("human-experience verdict out of phase" + at);
        r.human_exp = e.payload.at("verdict").get<bool>();
      } else if (e.event_kind == event_kind::kSessionClosed) {
        if (!r.human_exp) throw ValidationError("session_closed before the human-experience verdict" + at);
        const auto scores = score_session(r.state, *r.human_exp);
        if (scores_from_json(e.payload.at("scores")) != scores)
          throw ValidationError("logged scores differ from replayed scores" + at);
        r.scores = scores;
        closed = true;
      } else if (e.event_kind == event_kind::kSessionAborted) {
        r.aborted = true;
      } else if (e.event_kind != event_kind::kProviderError) {
        throw ValidationError("unknown event kind '" + e.event_kind + "'" + at);
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(std::string("malformed payload: ") + ex.what() + at);
    }
  }
  return r;
}

std::vector<Event> without_timestamps(std::vector<Event> events) {
  for (auto& e : events) e.ts.clear();
  return events;
}

}  // namespace tracelens
