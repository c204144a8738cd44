#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "ipelicit/elicit.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/mock.hpp"
#include "ipelicit/synth.hpp"

using namespace ipelicit;

namespace {

ChatRequest user_request(std::string user) {
  ChatRequest r;
  r.user = std::move(user);
  r.model = "m";
  return r;
}

std::string icl_question(double p, int m, std::uint64_t seed) {
  const auto task = synth::generate_icl_task(synth::TransformSpec::base_setup(), {p, seed}, m, 5, seed);
  return synth::render_icl_question(task);
}

// Minimal server failing the first `failures` requests with `status`.
class FlakyServer {
 public:
  FlakyServer(int failures, int status) : failures_(failures), status_(status) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      auth_ = req.get_header_value("Authorization");
      if (calls_++ < failures_) {
        res.status = status_;
        return;
      }
      res.set_content(mock_completion_body("m", "ok", {1, 1}), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FlakyServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_; }
  std::string auth() const { return auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int failures_;
  int status_;
  std::atomic<int> calls_{0};
  std::string auth_;
};

}  // namespace

TEST(MockScript, FromJsonAndMatching) {
  const auto script = MockScript::from_json(R"({
    "replies": [
      {"question": "q1", "kind": "definetti", "attempt": 2, "text": "second"},
      {"question": "q1", "kind": "definetti", "text": "first"},
      {"question": "*", "model": "other", "text": "model-specific"}
    ]})");
  ScriptedClient client(script);
  const auto cands = CandidateSet::make({"a", "b"});
  const auto prompt = render_prompt(PromptKind::kDefinetti, "q1", cands);
  EXPECT_EQ(client.reply_text(user_request(prompt)), "first");
  EXPECT_EQ(client.reply_text(user_request(prompt + render_retry_feedback(1, "x"))), "second");
  auto other = user_request(render_prompt(PromptKind::kProbint, "q2", cands));
  other.model = "other";
  EXPECT_EQ(client.reply_text(other), "model-specific");
  try {
    client.reply_text(user_request(render_prompt(PromptKind::kProbint, "q2", cands)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMockScriptExhausted);
  }
}

TEST(MockScript, UsageCountsWords) {
  EXPECT_EQ(count_tokens("  one two\nthree "), 3u);
  ScriptedClient client(MockScript::from_json(R"({"replies":[{"text":"a b c"}]})"));
  ChatRequest req = user_request("four words right here");
  req.system = "sys";
  const auto r = client.complete(req);
  EXPECT_EQ(r.usage, (Usage{5, 3}));
}

TEST(SimulatedIclAgent, VerbalizesCasingDistribution) {
  IclAgentParams params;
  params.p = 0.25;
  params.width_c = 2.0;
  const SimulatedIclAgent agent(params);
  EXPECT_EQ(agent.width(1), 1.0);
  EXPECT_EQ(agent.width(8), 0.25);

  const auto q = icl_question(0.25, 8, 3);
  const auto list = agent.respond(render_prompt(PromptKind::kCandidates, q, std::nullopt), 0);
  ASSERT_TRUE(list);
  const auto report = parse_structured_report(PromptKind::kCandidates, *list, std::nullopt,
                                              AnswerFolding::kCaseSensitive);
  ASSERT_EQ(report.answers.size(), 8u);
  const auto cands = CandidateSet::make(report.answers, true, AnswerFolding::kCaseSensitive);

  const auto prices = agent.respond(render_prompt(PromptKind::kDefinetti, q, cands), 0);
  const auto pr = parse_structured_report(PromptKind::kDefinetti, *prices, cands);
  const auto truth = synth::ground_truth_variants(cands[0], 0.25);
  double listed = 0.0;
  for (std::size_t i = 0; i < 8; ++i) listed += truth[i].prob;
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(pr.values[i], truth[i].prob / listed, 1e-12);
  EXPECT_TRUE(verify_report(pr, cands).passed);

  const auto iv = agent.respond(render_prompt(PromptKind::kProbint, q, cands), 0);
  const auto ir = parse_structured_report(PromptKind::kProbint, *iv, cands);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(ir.upper[i] - ir.lower[i], 0.25, 1e-12);
  EXPECT_FALSE(agent.respond("not an icl prompt", 0));
}

TEST(SimulatedIclAgent, EstimatesNoiseFromExamples) {
  const SimulatedIclAgent agent(IclAgentParams{});
  const auto q0 = icl_question(0.0, 40, 5);
  const auto list = agent.respond(render_prompt(PromptKind::kCandidates, q0, std::nullopt), 0);
  EXPECT_EQ(std::count(list->begin(), list->end(), '\n'), 1);
}

TEST(MockServer, ServesScriptOverHttp) {
  MockServer server(MockScript::from_json(R"({"replies":[{"text":"```\n1|price=1\n```"}]})"));
  ModelEndpoint e;
  e.base_url = server.base_url();
  e.model_id = "m";
  HttpChatClient client(e);
  const auto r = elicit_with_retry(client, e, PromptKind::kDefinetti, "q", CandidateSet::make({"x"}));
  EXPECT_TRUE(r.success);
  EXPECT_FALSE(r.attempt_log[0].raw_request.empty());
  EXPECT_FALSE(r.attempt_log[0].raw_response.empty());
  EXPECT_EQ(server.requests_served(), 1u);
  server.stop();
}

TEST(MockServer, ExhaustedScriptIsNotRetried) {
  MockServer server(MockScript{});
  ModelEndpoint e;
  e.base_url = server.base_url();
  int sleeps = 0;
  HttpChatClient client(e, {}, [&](std::chrono::milliseconds) { ++sleeps; });
  try {
    client.complete(user_request("hi"));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kTransportError);
    EXPECT_NE(std::string(err.what()).find("422"), std::string::npos);
  }
  EXPECT_EQ(sleeps, 0);
}

TEST(HttpChatClient, RetriesServerErrorsWithBackoff) {
  FlakyServer server(2, 503);
  ModelEndpoint e;
  e.base_url = server.url();
  std::vector<long> delays;
  HttpChatClient client(e, {4, std::chrono::milliseconds(100), 2.0},
                        [&](std::chrono::milliseconds d) { delays.push_back(d.count()); });
  EXPECT_EQ(client.complete(user_request("hi")).text, "ok");
  EXPECT_EQ(server.calls(), 3);
  EXPECT_EQ(delays, (std::vector<long>{100, 200}));
}

TEST(HttpChatClient, GivesUpAfterBudget) {
  FlakyServer server(100, 429);
  ModelEndpoint e;
  e.base_url = server.url();
  HttpChatClient client(e, {2, std::chrono::milliseconds(1), 2.0}, [](auto) {});
  EXPECT_THROW(client.complete(user_request("hi")), Error);
  EXPECT_EQ(server.calls(), 3);
}

TEST(HttpChatClient, UnreachableHostIsTransportError) {
  ModelEndpoint e;
  e.base_url = "http://127.0.0.1:1/v1";
  HttpChatClient client(e, {1, std::chrono::milliseconds(1), 2.0}, [](auto) {});
  try {
    client.complete(user_request("hi"));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kTransportError);
  }
}

TEST(HttpChatClient, BearerTokenFromEnvironmentNeverRecorded) {
  FlakyServer server(0, 200);
  ::setenv("IPELICIT_TEST_TOKEN", "s3cret-value", 1);
  ModelEndpoint e;
  e.base_url = server.url();
  e.auth_token_env = "IPELICIT_TEST_TOKEN";
  HttpChatClient client(e);
  const auto r = client.complete(user_request("hi"));
  EXPECT_EQ(server.auth(), "Bearer s3cret-value");
  EXPECT_EQ(r.raw_request.find("s3cret"), std::string::npos);
  EXPECT_EQ(r.raw_response.find("s3cret"), std::string::npos);
  ::unsetenv("IPELICIT_TEST_TOKEN");
}

TEST(MakeClient, MockSchemeLoadsScript) {
  ModelEndpoint e;
  e.base_url = std::string("mock://") + IPELICIT_TEST_DATA + "/definetti_script.json";
  auto client = make_client(e);
  EXPECT_NE(dynamic_cast<ScriptedClient*>(client.get()), nullptr);
}
