#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tracelens/error.hpp"

namespace tracelens {

struct ModelParams {
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::map<std::string, std::string> extra;

  bool operator==(const ModelParams&) const = default;
};

struct ModelRef {
  std::string provider_id;
  std::string model_name;
  ModelParams params;

  // "provider:model"; the model part may itself contain ':'.
  static ModelRef parse(std::string_view ref);
  std::string str() const { return provider_id + ":" + model_name; }

  bool operator==(const ModelRef&) const = default;
};

nlohmann::ordered_json to_json(const ModelRef& m);
ModelRef model_ref_from_json(const nlohmann::json& j);

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);

struct ChatMessage {
  Role role;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string request_id;
  std::vector<ChatMessage> messages;

  // Optional leading system message, then user/assistant alternating,
  // starting and ending with user.
  void validate() const;
};

struct Usage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason = "stop";
  Usage usage;
  double latency_ms = 0.0;
  std::size_t attempts = 1;
};

enum class ProviderErrorKind { Auth, RateLimit, Timeout, Malformed, Incomplete, Exhausted, Transport, Config };
std::string_view to_string(ProviderErrorKind k);

class ProviderError : public Error {
 public:
  ProviderError(ProviderErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ProviderErrorKind kind() const { return kind_; }
  bool retriable() const { return kind_ == ProviderErrorKind::RateLimit || kind_ == ProviderErrorKind::Timeout; }

 private:
  ProviderErrorKind kind_;
};

// Throws ProviderError(Incomplete) when the response was cut off.
void check_complete(const ChatResponse& r);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse complete(const ModelRef& model, const ChatRequest& request) = 0;
};

struct ScriptStep {
  std::string reply;
  std::optional<ProviderErrorKind> failure;
  std::string finish_reason = "stop";

  static ScriptStep say(std::string text) { return {std::move(text), std::nullopt, "stop"}; }
  static ScriptStep fail(ProviderErrorKind kind) { return {{}, kind, "stop"}; }
};

// Replays canned steps in order, one per call.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<ScriptStep> script);
  static std::unique_ptr<ScriptedProvider> from_replies(const std::vector<std::string>& replies);
  // JSON array of strings, or of {reply} / {error: kind} objects.
  static std::unique_ptr<ScriptedProvider> from_json(const nlohmann::json& j);

  ChatResponse complete(const ModelRef& model, const ChatRequest& request) override;
  std::size_t calls() const;
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<ScriptStep> script_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> seen_;
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds base_delay{250};
  double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

// Retries RateLimit and Timeout with exponential backoff. A request id that
// already produced a response gets that response again without a new call.
class RetryingProvider : public Provider {
 public:
  RetryingProvider(Provider& inner, RetryPolicy policy = {}, Sleeper sleep = real_sleeper());
  RetryingProvider(std::unique_ptr<Provider> inner, RetryPolicy policy = {}, Sleeper sleep = real_sleeper());
  ChatResponse complete(const ModelRef& model, const ChatRequest& request) override;

 private:
  std::unique_ptr<Provider> owned_;
  Provider& inner_;
  RetryPolicy policy_;
  Sleeper sleep_;
  std::mutex mu_;
  std::map<std::string, ChatResponse> delivered_;
};

struct ParamBounds {
  double min_temperature = 0.0;
  double max_temperature = 2.0;
  int max_tokens = 32768;
};

struct ProviderConfig {
  std::string id;
  std::string format;  // "openai", "anthropic" or "scripted"
  std::string endpoint;
  std::vector<std::string> models;
  std::size_t max_concurrency = 4;
  int timeout_ms = 60000;
  ParamBounds bounds;
  std::string script;  // scripted providers: path to the script file
};

std::vector<ProviderConfig> parse_provider_config(const nlohmann::json& j);
std::vector<ProviderConfig> load_provider_config(const std::filesystem::path& path);

// Env var holding the key for a provider id: PROVIDER_<ID>_API_KEY with the
// id upper-cased and non-alphanumerics mapped to '_'.
std::string api_key_variable(std::string_view provider_id);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

class ProviderRegistry {
 public:
  void add(ProviderConfig config, std::unique_ptr<Provider> provider);
  static ProviderRegistry from_config(const std::vector<ProviderConfig>& configs, const EnvLookup& env = process_env(),
                                      const std::filesystem::path& base_dir = {});

  // Checks the model is listed and its params are within bounds.
  void check(const ModelRef& model) const;
  Provider& get(const std::string& provider_id) const;
  bool contains(const std::string& provider_id) const { return entries_.contains(provider_id); }

 private:
  struct Entry {
    ProviderConfig config;
    std::unique_ptr<Provider> provider;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace tracelens
