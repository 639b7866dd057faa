#include "tracelens/http_provider.hpp"

#include <chrono>

#include <httplib.h>

namespace tracelens {
namespace {

struct SlotGuard {
  std::counting_semaphore<1024>& sem;
  explicit SlotGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

std::string join_path(const std::string& base, std::string_view leaf) {
  std::string out = base;
  while (!out.empty() && out.back() == '/') out.pop_back();
  out += leaf;
  return out;
}

}  // namespace

std::optional<ProviderErrorKind> classify_status(int status) {
  if (status >= 200 && status < 300) return std::nullopt;
  if (status == 401 || status == 403) return ProviderErrorKind::Auth;
  if (status == 429) return ProviderErrorKind::RateLimit;
  if (status == 408 || status == 504) return ProviderErrorKind::Timeout;
  return ProviderErrorKind::Transport;
}

HttpChatProvider::HttpChatProvider(ProviderConfig config, std::optional<std::string> api_key)
    : config_(std::move(config)),
      api_key_(std::move(api_key)),
      slots_(std::make_unique<std::counting_semaphore<1024>>(static_cast<std::ptrdiff_t>(config_.max_concurrency))) {
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ValidationError("provider '" + config_.id + "': endpoint must include a scheme");
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  origin_ = config_.endpoint.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? "" : config_.endpoint.substr(path_start);
}

HttpChatProvider::~HttpChatProvider() = default;

nlohmann::json HttpChatProvider::request_body(const ModelRef& model, const ChatRequest& request) const {
  nlohmann::json body;
  body["model"] = model.model_name;
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    if (config_.format == "anthropic" && m.role == Role::System) {
      body["system"] = m.content;
      continue;
    }
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["messages"] = messages;
  if (model.params.temperature) body["temperature"] = *model.params.temperature;
  if (model.params.max_tokens) body["max_tokens"] = *model.params.max_tokens;
  else if (config_.format == "anthropic") body["max_tokens"] = 4096;
  return body;
}

ChatResponse HttpChatProvider::parse_reply(const std::string& body) const {
  ChatResponse r;
  try {
    const auto j = nlohmann::json::parse(body);
    if (config_.format == "anthropic") {
      for (const auto& block : j.at("content"))
        if (block.value("type", "") == "text") r.content += block.at("text").get<std::string>();
      const auto stop = j.value("stop_reason", std::string("end_turn"));
      r.finish_reason = stop == "max_tokens" ? "length" : stop;
      if (j.contains("usage")) {
        r.usage.prompt_tokens = j["usage"].value("input_tokens", std::size_t{0});
        r.usage.completion_tokens = j["usage"].value("output_tokens", std::size_t{0});
      }
    } else {
      const auto& choice = j.at("choices").at(0);
      r.content = choice.at("message").at("content").get<std::string>();
      r.finish_reason = choice.value("finish_reason", std::string("stop"));
      if (j.contains("usage")) {
        r.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
        r.usage.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(ProviderErrorKind::Malformed, std::string("unreadable reply: ") + e.what());
  }
  return r;
}

ChatResponse HttpChatProvider::complete(const ModelRef& model, const ChatRequest& request) {
  request.validate();
  if (!api_key_ || api_key_->empty())
    throw ProviderError(ProviderErrorKind::Config, "no API key in " + api_key_variable(config_.id));

  httplib::Headers headers = {{"Idempotency-Key", request.request_id}};
  std::string path;
  if (config_.format == "anthropic") {
    path = join_path(base_path_, "/messages");
    headers.emplace("x-api-key", *api_key_);
    headers.emplace("anthropic-version", "2023-06-01");
  } else {
    path = join_path(base_path_, "/chat/completions");
    headers.emplace("Authorization", "Bearer " + *api_key_);
  }
  const auto body = request_body(model, request).dump();

  SlotGuard slot(*slots_);
  httplib::Client client(origin_);
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, headers, body, "application/json");
  const double latency = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!res) {
    const auto err = res.error();
    const bool timed_out =
        err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout;
    throw ProviderError(timed_out ? ProviderErrorKind::Timeout : ProviderErrorKind::Transport,
                        "request to " + config_.id + " failed: " + httplib::to_string(err));
  }
  if (auto kind = classify_status(res->status))
    throw ProviderError(*kind, config_.id + " returned HTTP " + std::to_string(res->status));
  auto reply = parse_reply(res->body);
  reply.latency_ms = latency;
  return reply;
}

}  // namespace tracelens
