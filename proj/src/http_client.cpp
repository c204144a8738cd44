#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ipelicit/client.hpp"
#include "ipelicit/error.hpp"

namespace ipelicit {

using ojson = nlohmann::ordered_json;

void ModelEndpoint::validate() const {
  if (base_url.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "endpoint '" + name + "' has no base_url");
  }
  if (price_per_input_token < 0.0 || price_per_output_token < 0.0) {
    throw Error(ErrorCode::kConfigInvalid, "endpoint '" + key() + "' has a negative price");
  }
}

std::string ModelEndpoint::key() const {
  if (!name.empty()) return name;
  return model_id + "@" + base_url;
}

std::string build_chat_body(const ChatRequest& request) {
  ojson body;
  body["model"] = request.model;
  ojson messages = ojson::array();
  if (!request.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user}});
  body["messages"] = std::move(messages);
  if (request.temperature) body["temperature"] = *request.temperature;
  if (request.seed) body["seed"] = *request.seed;
  return body.dump();
}

ChatReply parse_chat_response(const std::string& body) {
  ChatReply reply;
  reply.raw_response = body;
  try {
    const auto j = nlohmann::json::parse(body);
    reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      reply.usage.input_tokens = u.value("prompt_tokens", std::uint64_t{0});
      reply.usage.output_tokens = u.value("completion_tokens", std::uint64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kTransportError,
                std::string("response is not a chat completion: ") + e.what());
  }
  return reply;
}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigInvalid, "base_url '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpChatClient::HttpChatClient(ModelEndpoint endpoint, BackoffPolicy policy,
                               Sleeper sleeper)
    : endpoint_(std::move(endpoint)), policy_(policy), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

ChatReply HttpChatClient::complete(const ChatRequest& request) {
  const auto url = split_url(endpoint_.base_url);
  httplib::Client cli(url.origin);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(300);
  if (!endpoint_.auth_token_env.empty()) {
    if (const char* token = std::getenv(endpoint_.auth_token_env.c_str())) {
      cli.set_bearer_token_auth(token);
    }
  }
  const std::string body = build_chat_body(request);
  const std::string path = url.prefix + "/chat/completions";

  auto delay = policy_.initial_delay;
  std::string last_failure;
  for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(delay);
      delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(delay.count()) * policy_.multiplier));
    }
    auto res = cli.Post(path, body, "application/json");
    if (!res) {
      last_failure = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      ChatReply reply = parse_chat_response(res->body);
      reply.raw_request = body;
      return reply;
    }
    last_failure = "HTTP " + std::to_string(res->status);
    if (!retryable_status(res->status)) break;
  }
  throw Error(ErrorCode::kTransportError,
              endpoint_.key() + " " + path + ": " + last_failure);
}

}  // namespace ipelicit
