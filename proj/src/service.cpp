#include "tracelens/service.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <httplib.h>

#include "tracelens/error.hpp"
#include "tracelens/metrics.hpp"

namespace tracelens {
namespace {

using ojson = nlohmann::ordered_json;

ServiceResponse error_response(int status, const std::string& message) { return {status, ojson{{"error", message}}}; }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string::npos ? path.size() : j;
    if (end > i) out.push_back(path.substr(i, end - i));
    i = end;
  }
  return out;
}

ojson state_view(const LadderState& s) {
  ojson j;
  j["phase"] = phase_name(s.phase);
  if (const auto* soc = std::get_if<phase::Socratic>(&s.phase)) {
    j["level"] = to_string(soc->level);
    j["step"] = soc->step;
  } else {
    j["level"] = nullptr;
    j["step"] = nullptr;
  }
  j["awaiting_response"] = s.awaiting_response;
  j["history"] = ojson::array();
  for (const auto& h : s.history) {
    ojson e;
    e["prompt"] = h.prompt;
    e["response"] = h.response;
    e["empty_response"] = h.empty_response;
    e["judgments"] = ojson::array();
    for (const auto& jd : h.judgments) e["judgments"].push_back({{"level", to_string(jd.level)}, {"verdict", jd.verdict}});
    j["history"].push_back(std::move(e));
  }
  j["prompts_issued"] = s.prompts_issued;
  j["socratic_turns"] = s.socratic_turns;
  j["pointing_used"] = s.pointing_used;
  j["revealed"] = s.revealed;
  j["tte"] = s.tte_mark.value_or(s.socratic_turns);
  return j;
}

bool parse_verdict(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("verdict") || !body["verdict"].is_boolean())
    throw ValidationError("body must be an object with a boolean 'verdict'");
  return body["verdict"].get<bool>();
}

}  // namespace

ojson session_view(const SessionDriver& d) {
  ojson j;
  j["session_id"] = d.session_id();
  j["exhibit_id"] = d.exhibit_id();
  j["model"] = to_json(d.model());
  j["status"] = to_string(d.status());
  const auto& s = d.state();
  if (auto token = d.pending_token()) {
    j["pending"] = {{"token", *token},
                    {"level", to_string(s.pending->level)},
                    {"history_index", s.pending->history_index},
                    {"response", s.history[s.pending->history_index].response}};
  } else {
    j["pending"] = nullptr;
  }
  j.update(state_view(s));
  j["scores"] = d.scores() ? to_json(*d.scores()) : ojson(nullptr);
  j["abort_reason"] = d.abort_reason();
  return j;
}

ReviewService::ReviewService(Store& store, const ProviderRegistry& providers, std::vector<Exhibit> exhibits,
                             Clock clock)
    : store_(store), providers_(providers), exhibits_(std::move(exhibits)), clock_(std::move(clock)) {}

ReviewService::~ReviewService() { stop(); }

ServiceResponse ReviewService::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    const auto parts = split_path(path.substr(0, path.find('?')));
    const bool get = method == "GET", post = method == "POST";
    const auto parse_body = [&] {
      try {
        return body.empty() ? nlohmann::json::object() : nlohmann::json::parse(body);
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("body is not JSON: ") + e.what());
      }
    };
    if (parts.size() == 1 && parts[0] == "sessions") {
      if (get) return list_sessions();
      if (post) return create_session(parse_body());
    } else if (parts.size() == 2 && parts[0] == "sessions") {
      if (get) return get_session(parts[1]);
    } else if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "judgment") {
      if (post) return post_judgment(parts[1], parse_body());
    } else if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "human-exp") {
      if (post) return post_human_exp(parts[1], parse_body());
    } else if (parts.size() == 1 && parts[0] == "exhibits") {
      if (get) return list_exhibits();
    } else if (parts.size() == 1 && parts[0] == "report") {
      if (get) return report();
    } else {
      return error_response(404, "no route for " + path);
    }
    return error_response(405, method + " not allowed on " + path);
  } catch (const IllegalTransition& e) {
    return error_response(409, e.what());
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  } catch (const ParseError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

std::shared_ptr<ReviewService::Live> ReviewService::find_live(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = live_.find(id);
  return it == live_.end() ? nullptr : it->second;
}

void ReviewService::persist_if_finished(Live& live) {
  const auto st = live.driver->status();
  if (live.persisted || (st != DriverStatus::Closed && st != DriverStatus::Aborted)) return;
  store_.append_session(live.driver->record(), live.driver->events());
  live.persisted = true;
}

ServiceResponse ReviewService::list_sessions() {
  ojson list = ojson::array();
  std::set<std::string> seen;
  for (const auto& r : store_.load_sessions()) {
    seen.insert(r.session_id);
    list.push_back({{"session_id", r.session_id},
                    {"exhibit_id", r.exhibit_id},
                    {"model", to_json(r.model)},
                    {"status", to_string(r.status)},
                    {"scores", r.scores ? to_json(*r.scores) : ojson(nullptr)}});
  }
  std::vector<std::shared_ptr<Live>> live;
  {
    std::shared_lock lock(map_mu_);
    for (const auto& [id, l] : live_)
      if (!seen.contains(id)) live.push_back(l);
  }
  for (const auto& l : live) {
    std::lock_guard lock(l->mu);
    const auto& d = *l->driver;
    list.push_back({{"session_id", d.session_id()},
                    {"exhibit_id", d.exhibit_id()},
                    {"model", to_json(d.model())},
                    {"status", to_string(d.status())},
                    {"scores", d.scores() ? to_json(*d.scores()) : ojson(nullptr)}});
  }
  return {200, ojson{{"sessions", list}}};
}

ServiceResponse ReviewService::get_session(const std::string& id) {
  if (auto live = find_live(id)) {
    std::lock_guard lock(live->mu);
    return {200, session_view(*live->driver)};
  }
  for (const auto& r : store_.load_sessions()) {
    if (r.session_id != id) continue;
    const auto replayed = replay(store_.load_events(r));
    ojson j;
    j["session_id"] = r.session_id;
    j["exhibit_id"] = r.exhibit_id;
    j["model"] = to_json(r.model);
    j["status"] = to_string(r.status);
    j["pending"] = nullptr;
    j.update(state_view(replayed.state));
    j["scores"] = r.scores ? to_json(*r.scores) : ojson(nullptr);
    j["abort_reason"] = "";
    return {200, j};
  }
  return error_response(404, "unknown session '" + id + "'");
}

ServiceResponse ReviewService::create_session(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("exhibit_id") || !body["exhibit_id"].is_string() ||
      !body.contains("model") || !body["model"].is_string())
    throw ValidationError("body needs string 'exhibit_id' and 'model'");
  const auto exhibit_id = body["exhibit_id"].get<std::string>();
  const auto it = std::find_if(exhibits_.begin(), exhibits_.end(), [&](const auto& e) { return e.id == exhibit_id; });
  if (it == exhibits_.end()) return error_response(404, "unknown exhibit '" + exhibit_id + "'");
  const auto model = ModelRef::parse(body["model"].get<std::string>());
  providers_.check(model);
  Provider& provider = providers_.get(model.provider_id);

  std::shared_ptr<Live> live = std::make_shared<Live>();
  std::unique_lock live_lock(live->mu);
  {
    std::unique_lock lock(map_mu_);
    std::string id;
    if (body.contains("session_id")) {
      if (!body["session_id"].is_string()) throw ValidationError("'session_id' must be a string");
      id = body["session_id"].get<std::string>();
      if (live_.contains(id) || store_.contains(id)) return error_response(409, "session '" + id + "' exists");
    } else {
      do {
        char buf[32];
        std::snprintf(buf, sizeof buf, "session-%04zu", next_id_++);
        id = buf;
      } while (live_.contains(id) || store_.contains(id));
    }
    live->driver = std::make_unique<SessionDriver>(id, *it, model, provider, clock_);
    live_.emplace(id, live);
  }
  live->driver->pump();
  persist_if_finished(*live);
  return {201, session_view(*live->driver)};
}

ServiceResponse ReviewService::post_judgment(const std::string& id, const nlohmann::json& body) {
  auto live = find_live(id);
  if (!live) return error_response(404, "unknown or finished session '" + id + "'");
  const bool verdict = parse_verdict(body);
  std::optional<std::string> token;
  if (body.contains("token")) {
    if (!body["token"].is_string()) throw ValidationError("'token' must be a string");
    token = body["token"].get<std::string>();
  }
  std::lock_guard lock(live->mu);
  live->driver->judge(verdict, token);
  live->driver->pump();
  persist_if_finished(*live);
  return {200, session_view(*live->driver)};
}

ServiceResponse ReviewService::post_human_exp(const std::string& id, const nlohmann::json& body) {
  auto live = find_live(id);
  if (!live) return error_response(404, "unknown or finished session '" + id + "'");
  const bool verdict = parse_verdict(body);
  std::lock_guard lock(live->mu);
  live->driver->judge_human_experience(verdict);
  persist_if_finished(*live);
  return {200, session_view(*live->driver)};
}

ServiceResponse ReviewService::list_exhibits() const {
  ojson list = ojson::array();
  for (const auto& e : exhibits_) list.push_back(to_json(e));
  return {200, ojson{{"exhibits", list}}};
}

ServiceResponse ReviewService::report() const { return {200, to_json(aggregate(store_.load_sessions()))}; }

int ReviewService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  server_->Get(".*", route);
  server_->Post(".*", route);
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ReviewService::serve() {
  if (!server_) throw Error("service not bound");
  server_->listen_after_bind();
}

void ReviewService::wait_ready() const {
  if (server_) server_->wait_until_ready();
}

void ReviewService::stop() {
  if (server_) server_->stop();
}

}  // namespace tracelens
