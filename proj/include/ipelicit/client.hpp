#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ipelicit/report.hpp"

namespace ipelicit {

struct ChatRequest {
  std::string system;
  std::string user;
  std::string model;
  std::optional<double> temperature;  // endpoint default when unset
  std::optional<std::int64_t> seed;
};

struct ChatReply {
  std::string text;
  Usage usage;
  std::string raw_request;
  std::string raw_response;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Throws Error(TransportError) once the transport gives up.
  virtual ChatReply complete(const ChatRequest& request) = 0;
};

struct ModelEndpoint {
  std::string name;      // label used in records and cost reports
  std::string base_url;  // http(s)://host[:port][/prefix], or mock://script.json
  std::string model_id;
  std::string auth_token_env;  // name of the variable, never its value
  std::optional<double> temperature;
  std::optional<std::int64_t> seed;
  double price_per_input_token = 0.0;
  double price_per_output_token = 0.0;
  bool seed_supported = true;

  // Throws ConfigInvalid for an empty base_url or negative prices.
  void validate() const;
  // `name` when set, otherwise model_id@base_url.
  std::string key() const;
};

// OpenAI-compatible chat completion body.
std::string build_chat_body(const ChatRequest& request);
// choices[0].message.content and usage.{prompt,completion}_tokens.
// Throws TransportError for a body that is not a chat completion.
ChatReply parse_chat_response(const std::string& body);

struct BackoffPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
};

// POST {base_url}/chat/completions with retries on connection failures,
// 429 and 5xx responses.
class HttpChatClient : public ChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpChatClient(ModelEndpoint endpoint, BackoffPolicy policy = {},
                          Sleeper sleeper = {});
  ChatReply complete(const ChatRequest& request) override;

 private:
  ModelEndpoint endpoint_;
  BackoffPolicy policy_;
  Sleeper sleeper_;
};

}  // namespace ipelicit
