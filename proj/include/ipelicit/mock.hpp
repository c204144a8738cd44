#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ipelicit/client.hpp"
#include "ipelicit/synth.hpp"

namespace ipelicit {

// Programmed responder for synthetic ICL questions. It knows the transform,
// reads the examples and query from the prompt and verbalizes:
//   first order:  the casing distribution p^l (1-p)^(L-l) over the listed
//                 answers (p declared, or estimated from the example outputs);
//   second order: an imprecision w(m) = min(1, c/m) that shrinks with the
//                 number m of in-context examples.
struct IclAgentParams {
  std::string transform = "rotation:13,cyclic_shift:1";
  std::optional<double> p;      // estimated from the examples when unset
  double width_c = 1.0;         // w(m) = min(1, width_c / m)
  double error_scale = 0.0;     // P(wrong prediction) = error_scale * w(m)
  int max_candidates = 8;       // most probable case variants listed
};

class SimulatedIclAgent {
 public:
  explicit SimulatedIclAgent(IclAgentParams params);
  // Reply text for a rendered prompt; nullopt when the prompt is not an ICL
  // question this agent understands.
  std::optional<std::string> respond(std::string_view prompt,
                                     std::optional<std::int64_t> seed) const;
  double width(int m) const;
  const IclAgentParams& params() const { return params_; }

 private:
  IclAgentParams params_;
  synth::TransformSpec spec_;
};

struct ScriptedReply {
  std::string question = "*";  // "*" matches any question
  std::optional<PromptKind> kind;
  std::optional<int> attempt;  // unset matches every attempt
  std::optional<std::int64_t> seed;
  std::optional<std::string> model;
  std::string text;
};

// Ordered replies plus an optional programmed agent. Lookup takes the first
// scripted entry matching (question, kind, attempt, seed, model), then falls
// back to the agent; with neither, the script is exhausted.
struct MockScript {
  std::vector<ScriptedReply> replies;
  std::optional<IclAgentParams> icl_agent;

  static MockScript from_json(std::string_view text);
  static MockScript load(const std::filesystem::path& path);
};

// Whitespace-separated word count; the mock's deterministic token measure.
std::uint64_t count_tokens(std::string_view text);

// Deterministic chat completion body for a reply text and usage.
std::string mock_completion_body(const std::string& model, const std::string& text,
                                 const Usage& usage);

// Answers a chat request from a script. Stateless, hence thread-safe.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(MockScript script);
  ChatReply complete(const ChatRequest& request) override;
  // Reply text only; throws MockScriptExhausted.
  std::string reply_text(const ChatRequest& request) const;

 private:
  MockScript script_;
  std::optional<SimulatedIclAgent> agent_;
};

// Local OpenAI-compatible endpoint serving a script over HTTP.
class MockServer {
 public:
  explicit MockServer(MockScript script, std::string host = "127.0.0.1", int port = 0);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;
  std::uint64_t requests_served() const;
  // Blocks until stop() is called from another thread.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
};

// HttpChatClient for http(s) endpoints, in-process ScriptedClient for
// mock://<script.json>.
std::unique_ptr<ChatClient> make_client(const ModelEndpoint& endpoint);

}  // namespace ipelicit
