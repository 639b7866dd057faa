#include "tracelens/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "tracelens/http_provider.hpp"

namespace tracelens {

ModelRef ModelRef::parse(std::string_view ref) {
  const auto colon = ref.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == ref.size())
    throw ValidationError("model reference must look like provider:model, got '" + std::string(ref) + "'");
  return {std::string(ref.substr(0, colon)), std::string(ref.substr(colon + 1)), {}};
}

nlohmann::ordered_json to_json(const ModelRef& m) {
  nlohmann::ordered_json j;
  j["provider"] = m.provider_id;
  j["name"] = m.model_name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  if (m.params.temperature) params["temperature"] = *m.params.temperature;
  if (m.params.max_tokens) params["max_tokens"] = *m.params.max_tokens;
  for (const auto& [k, v] : m.params.extra) params[k] = v;
  j["params"] = params;
  return j;
}

ModelRef model_ref_from_json(const nlohmann::json& j) {
  ModelRef m;
  m.provider_id = j.at("provider").get<std::string>();
  m.model_name = j.at("name").get<std::string>();
  if (j.contains("params")) {
    for (const auto& [k, v] : j["params"].items()) {
      if (k == "temperature") m.params.temperature = v.get<double>();
      else if (k == "max_tokens") m.params.max_tokens = v.get<int>();
      else m.params.extra[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return m;
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: break;
  }
  return "assistant";
}

void ChatRequest::validate() const {
  std::size_t i = 0;
  if (!messages.empty() && messages[0].role == Role::System) ++i;
  if (i == messages.size()) throw ValidationError("chat request has no user message");
  for (std::size_t k = i; k < messages.size(); ++k) {
    const Role expected = (k - i) % 2 == 0 ? Role::User : Role::Assistant;
    if (messages[k].role != expected)
      throw ValidationError("chat request roles must alternate user/assistant (message " + std::to_string(k) + ")");
  }
  if (messages.back().role != Role::User) throw ValidationError("chat request must end with a user message");
}

std::string_view to_string(ProviderErrorKind k) {
  switch (k) {
    case ProviderErrorKind::Auth: return "auth";
    case ProviderErrorKind::RateLimit: return "rate_limit";
    case ProviderErrorKind::Timeout: return "timeout";
    case ProviderErrorKind::Malformed: return "malformed";
    case ProviderErrorKind::Incomplete: return "incomplete";
    case ProviderErrorKind::Exhausted: return "exhausted";
    case ProviderErrorKind::Transport: return "transport";
    case ProviderErrorKind::Config: break;
  }
  return "config";
}

void check_complete(const ChatResponse& r) {
  if (r.finish_reason == "length" || r.finish_reason == "max_tokens")
    throw ProviderError(ProviderErrorKind::Incomplete, "response truncated (finish reason '" + r.finish_reason + "')");
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptStep> script) : script_(std::move(script)) {
  if (script_.empty()) throw ValidationError("scripted provider needs at least one step");
}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_replies(const std::vector<std::string>& replies) {
  std::vector<ScriptStep> steps;
  for (const auto& r : replies) steps.push_back(ScriptStep::say(r));
  return std::make_unique<ScriptedProvider>(std::move(steps));
}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("script must be a JSON array");
  std::vector<ScriptStep> steps;
  for (const auto& s : j) {
    if (s.is_string()) {
      steps.push_back(ScriptStep::say(s.get<std::string>()));
      continue;
    }
    if (!s.is_object()) throw ParseError("script steps must be strings or objects");
    if (s.contains("error")) {
      const auto kind = s["error"].get<std::string>();
      bool found = false;
      for (auto k : {ProviderErrorKind::Auth, ProviderErrorKind::RateLimit, ProviderErrorKind::Timeout,
                     ProviderErrorKind::Malformed, ProviderErrorKind::Transport}) {
        if (to_string(k) == kind) {
          steps.push_back(ScriptStep::fail(k));
          found = true;
        }
      }
      if (!found) throw ParseError("unknown scripted error '" + kind + "'");
    } else {
      steps.push_back({s.at("reply").get<std::string>(), std::nullopt, s.value("finish_reason", "stop")});
    }
  }
  return std::make_unique<ScriptedProvider>(std::move(steps));
}

ChatResponse ScriptedProvider::complete(const ModelRef&, const ChatRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  std::lock_guard lock(mu_);
  seen_.push_back(request);
  if (next_ >= script_.size())
    throw ProviderError(ProviderErrorKind::Exhausted, "script exhausted after " + std::to_string(script_.size()) + " steps");
  const auto& step = script_[next_++];
  if (step.failure) throw ProviderError(*step.failure, "scripted failure");
  ChatResponse r;
  r.content = step.reply;
  r.finish_reason = step.finish_reason;
  r.usage.completion_tokens = step.reply.size() / 4;
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

std::vector<ChatRequest> ScriptedProvider::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RetryingProvider::RetryingProvider(Provider& inner, RetryPolicy policy, Sleeper sleep)
    : inner_(inner), policy_(policy), sleep_(std::move(sleep)) {}

RetryingProvider::RetryingProvider(std::unique_ptr<Provider> inner, RetryPolicy policy, Sleeper sleep)
    : owned_(std::move(inner)), inner_(*owned_), policy_(policy), sleep_(std::move(sleep)) {}

ChatResponse RetryingProvider::complete(const ModelRef& model, const ChatRequest& request) {
  if (!request.request_id.empty()) {
    std::lock_guard lock(mu_);
    if (auto it = delivered_.find(request.request_id); it != delivered_.end()) return it->second;
  }
  const std::size_t attempts = std::max<std::size_t>(1, policy_.max_attempts);
  for (std::size_t attempt = 1;; ++attempt) {
    try {
      auto r = inner_.complete(model, request);
      r.attempts = attempt;
      if (!request.request_id.empty()) {
        std::lock_guard lock(mu_);
        delivered_.emplace(request.request_id, r);
      }
      return r;
    } catch (const ProviderError& e) {
      if (!e.retriable() || attempt >= attempts) throw;
      const auto delay = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(policy_.base_delay.count()) * std::pow(policy_.multiplier, attempt - 1)));
      sleep_(delay);
    }
  }
}

std::vector<ProviderConfig> parse_provider_config(const nlohmann::json& j) {
  try {
    std::vector<ProviderConfig> out;
    for (const auto& p : j.at("providers")) {
      ProviderConfig c;
      c.id = p.at("id").get<std::string>();
      c.format = p.value("format", "openai");
      c.endpoint = p.value("endpoint", "");
      c.models = p.value("models", std::vector<std::string>{});
      c.max_concurrency = p.value("max_concurrency", std::size_t{4});
      c.timeout_ms = p.value("timeout_ms", 60000);
      c.script = p.value("script", "");
      if (p.contains("bounds")) {
        const auto& b = p["bounds"];
        c.bounds.min_temperature = b.value("min_temperature", c.bounds.min_temperature);
        c.bounds.max_temperature = b.value("max_temperature", c.bounds.max_temperature);
        c.bounds.max_tokens = b.value("max_tokens", c.bounds.max_tokens);
      }
      if (c.format != "openai" && c.format != "anthropic" && c.format != "scripted")
        throw ValidationError("provider '" + c.id + "': unknown format '" + c.format + "'");
      if (c.format != "scripted" && c.endpoint.empty())
        throw ValidationError("provider '" + c.id + "': endpoint required");
      if (c.max_concurrency == 0 || c.max_concurrency > 1024)
        throw ValidationError("provider '" + c.id + "': max_concurrency must be 1..1024");
      out.push_back(std::move(c));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed provider config: ") + e.what());
  }
}

std::vector<ProviderConfig> load_provider_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  try {
    return parse_provider_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string api_key_variable(std::string_view provider_id) {
  std::string out = "PROVIDER_";
  for (char c : provider_id)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                              : '_');
  return out + "_API_KEY";
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

void ProviderRegistry::add(ProviderConfig config, std::unique_ptr<Provider> provider) {
  auto id = config.id;
  entries_[id] = Entry{std::move(config), std::move(provider)};
}

ProviderRegistry ProviderRegistry::from_config(const std::vector<ProviderConfig>& configs, const EnvLookup& env,
                                               const std::filesystem::path& base_dir) {
  ProviderRegistry reg;
  for (const auto& c : configs) {
    std::unique_ptr<Provider> inner;
    if (c.format == "scripted") {
      auto path = std::filesystem::path(c.script);
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      std::ifstream in(path);
      if (!in) throw ParseError("cannot read script " + path.string());
      inner = ScriptedProvider::from_json(nlohmann::json::parse(in));
    } else {
      inner = std::make_unique<HttpChatProvider>(c, env(api_key_variable(c.id)));
    }
    reg.add(c, std::make_unique<RetryingProvider>(std::move(inner)));
  }
  return reg;
}

void ProviderRegistry::check(const ModelRef& model) const {
  auto it = entries_.find(model.provider_id);
  if (it == entries_.end()) throw ValidationError("unknown provider '" + model.provider_id + "'");
  const auto& c = it->second.config;
  if (!c.models.empty() && std::find(c.models.begin(), c.models.end(), model.model_name) == c.models.end())
    throw ValidationError("provider '" + c.id + "' does not list model '" + model.model_name + "'");
  if (model.params.temperature &&
      (*model.params.temperature < c.bounds.min_temperature || *model.params.temperature > c.bounds.max_temperature))
    throw ValidationError("temperature outside provider bounds");
  if (model.params.max_tokens && (*model.params.max_tokens <= 0 || *model.params.max_tokens > c.bounds.max_tokens))
    throw ValidationError("max_tokens outside provider bounds");
}

Provider& ProviderRegistry::get(const std::string& provider_id) const {
  auto it = entries_.find(provider_id);
  if (it == entries_.end()) throw ValidationError("unknown provider '" + provider_id + "'");
  return *it->second.provider;
}

}  // namespace tracelens
