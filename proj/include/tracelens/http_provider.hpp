#pragma once

#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "tracelens/provider.hpp"

namespace tracelens {

// Chat completion over HTTP(S). "openai" posts to <endpoint>/chat/completions,
// "anthropic" to <endpoint>/messages. At most max_concurrency requests are in
// flight per provider instance.
class HttpChatProvider : public Provider {
 public:
  HttpChatProvider(ProviderConfig config, std::optional<std::string> api_key);
  ~HttpChatProvider() override;

  ChatResponse complete(const ModelRef& model, const ChatRequest& request) override;

  // Exposed for tests: body sent for a request, and parsing of a reply body.
  nlohmann::json request_body(const ModelRef& model, const ChatRequest& request) const;
  ChatResponse parse_reply(const std::string& body) const;

 private:
  ProviderConfig config_;
  std::optional<std::string> api_key_;
  std::string origin_;  // scheme://host[:port]
  std::string base_path_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
};

// HTTP status to failure kind; nullopt for 2xx.
std::optional<ProviderErrorKind> classify_status(int status);

}  // namespace tracelens
