#include "ipelicit/mock.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "ipelicit/error.hpp"
#include "ipelicit/prompts.hpp"

namespace ipelicit {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kInputTag = "Input: ";
constexpr std::string_view kArrow = " → Output:";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double hash_unit(std::string_view text, std::string_view salt) {
  return static_cast<double>(fnv1a(salt, fnv1a(text)) >> 11) * 0x1.0p-53;
}

struct ParsedIcl {
  std::vector<std::string> outputs;
  std::string query;
};

std::optional<ParsedIcl> parse_icl_question(std::string_view question) {
  ParsedIcl out;
  bool have_query = false;
  std::istringstream lines{std::string(question)};
  std::string line;
  while (std::getline(lines, line)) {
    if (!std::string_view(line).starts_with(kInputTag)) continue;
    const auto arrow = line.find(kArrow);
    if (arrow == std::string::npos) continue;
    std::string input = line.substr(kInputTag.size(), arrow - kInputTag.size());
    std::string rest = line.substr(arrow + kArrow.size());
    while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
    if (rest.empty()) {
      out.query = std::move(input);
      have_query = true;
    } else {
      out.outputs.push_back(std::move(rest));
    }
  }
  if (!have_query) return std::nullopt;
  return out;
}

double estimate_p(const std::vector<std::string>& outputs) {
  std::size_t letters = 0;
  std::size_t lower = 0;
  for (const auto& o : outputs) {
    for (char c : o) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        ++letters;
        if (std::islower(static_cast<unsigned char>(c))) ++lower;
      }
    }
  }
  return letters == 0 ? 0.0 : static_cast<double>(lower) / static_cast<double>(letters);
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string fenced(const std::vector<std::string>& rows) {
  std::string out = "```\n";
  for (const auto& r : rows) out += r + "\n";
  out += "```";
  return out;
}

}  // namespace

SimulatedIclAgent::SimulatedIclAgent(IclAgentParams params)
    : params_(std::move(params)), spec_(synth::TransformSpec::parse(params_.transform)) {}

double SimulatedIclAgent::width(int m) const {
  if (m <= 0) return 1.0;
  return std::min(1.0, params_.width_c / static_cast<double>(m));
}

std::optional<std::string> SimulatedIclAgent::respond(
    std::string_view prompt, std::optional<std::int64_t> seed) const {
  const auto kind = detect_prompt_kind(prompt);
  const auto question = extract_question(prompt);
  if (!kind || !question) return std::nullopt;
  const auto icl = parse_icl_question(*question);
  if (!icl) return std::nullopt;

  const int m = static_cast<int>(icl->outputs.size());
  const double w = width(m);
  const double p = params_.p ? *params_.p : estimate_p(icl->outputs);
  const double err = std::clamp(params_.error_scale * w, 0.0, 1.0);

  std::string prediction = synth::apply_transform(spec_, icl->query);
  if (hash_unit(*question, "prediction") < err && !prediction.empty()) {
    prediction[0] = synth::apply_rotation(prediction.substr(0, 1), 1)[0];
  }

  if (*kind == PromptKind::kCandidates) {
    auto variants = synth::ground_truth_variants(prediction, p);
    std::stable_sort(variants.begin(), variants.end(),
                     [](const auto& a, const auto& b) { return a.prob > b.prob; });
    const auto keep = std::min<std::size_t>(variants.size(),
                                            static_cast<std::size_t>(params_.max_candidates));
    std::string out;
    for (std::size_t i = 0; i < keep; ++i) {
      out += std::to_string(i + 1) + ". " + variants[i].text + "\n";
    }
    return out;
  }

  if (*kind == PromptKind::kVanilla) {
    return fenced({"CONF|conf=" + num(1.0 - err)});
  }

  const auto listed = extract_prompt_candidates(prompt);
  const std::size_t n = listed.size();
  if (n == 0) return std::nullopt;
  std::vector<double> q(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (upper(listed[i]) != prediction) continue;
    int letters = 0;
    int lower = 0;
    for (char c : listed[i]) {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        ++letters;
        if (std::islower(static_cast<unsigned char>(c))) ++lower;
      }
    }
    q[i] = synth::casing_probability(letters, lower, p);
    total += q[i];
  }
  for (double& v : q) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(n);

  std::vector<std::string> rows;
  switch (*kind) {
    case PromptKind::kDefinetti:
      for (std::size_t i = 0; i < n; ++i) rows.push_back(std::to_string(i + 1) + "|price=" + num(q[i]));
      break;
    case PromptKind::kProbint:
      for (std::size_t i = 0; i < n; ++i) {
        const double lo = q[i] * (1.0 - w);
        rows.push_back(std::to_string(i + 1) + "|lower=" + num(lo) +
                       "|upper=" + num(std::min(1.0, lo + w)));
      }
      break;
    case PromptKind::kCredal: {
      const auto vertex = static_cast<std::size_t>(
          seed ? static_cast<std::uint64_t>(*seed) % n : 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = (1.0 - w) * q[i] + (i == vertex ? w : 0.0);
        rows.push_back(std::to_string(i + 1) + "|prob=" + num(v));
      }
      break;
    }
    case PromptKind::kPossibility: {
      const double top = *std::max_element(q.begin(), q.end());
      for (std::size_t i = 0; i < n; ++i) rows.push_back(std::to_string(i + 1) + "|pos=" + num(q[i] / top));
      rows.push_back("NOTA|pos=" + num(w));
      break;
    }
    default:
      return std::nullopt;
  }
  return fenced(rows);
}

MockScript MockScript::from_json(std::string_view text) {
  MockScript script;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& r : j.value("replies", nlohmann::json::array())) {
      ScriptedReply reply;
      reply.question = r.value("question", std::string("*"));
      if (r.contains("kind")) reply.kind = prompt_kind_from_string(r["kind"].get<std::string>());
      if (r.contains("attempt")) reply.attempt = r["attempt"].get<int>();
      if (r.contains("seed")) reply.seed = r["seed"].get<std::int64_t>();
      if (r.contains("model")) reply.model = r["model"].get<std::string>();
      reply.text = r.at("text").get<std::string>();
      script.replies.push_back(std::move(reply));
    }
    if (j.contains("icl_agent")) {
      const auto& a = j["icl_agent"];
      IclAgentParams params;
      params.transform = a.value("transform", params.transform);
      if (a.contains("p") && !a["p"].is_null()) params.p = a["p"].get<double>();
      params.width_c = a.value("width_c", params.width_c);
      params.error_scale = a.value("error_scale", params.error_scale);
      params.max_candidates = a.value("max_candidates", params.max_candidates);
      script.icl_agent = params;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("mock script: ") + e.what());
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read mock script " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::uint64_t count_tokens(std::string_view text) {
  std::uint64_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string mock_completion_body(const std::string& model, const std::string& text,
                                 const Usage& usage) {
  ojson body;
  body["id"] = "mock-completion";
  body["object"] = "chat.completion";
  body["model"] = model;
  body["choices"] = ojson::array({{{"index", 0},
                                   {"message", {{"role", "assistant"}, {"content", text}}},
                                   {"finish_reason", "stop"}}});
  body["usage"] = {{"prompt_tokens", usage.input_tokens},
                   {"completion_tokens", usage.output_tokens},
                   {"total_tokens", usage.input_tokens + usage.output_tokens}};
  return body.dump();
}

ScriptedClient::ScriptedClient(MockScript script) : script_(std::move(script)) {
  if (script_.icl_agent) agent_.emplace(*script_.icl_agent);
}

std::string ScriptedClient::reply_text(const ChatRequest& request) const {
  const auto kind = detect_prompt_kind(request.user);
  const auto question = extract_question(request.user);
  const int attempt = detect_attempt(request.user);
  for (const auto& r : script_.replies) {
    if (r.question != "*" && (!question || *question != r.question)) continue;
    if (r.kind && r.kind != kind) continue;
    if (r.attempt && *r.attempt != attempt) continue;
    if (r.seed && r.seed != request.seed) continue;
    if (r.model && *r.model != request.model) continue;
    return r.text;
  }
  if (agent_) {
    if (auto text = agent_->respond(request.user, request.seed)) return *text;
  }
  throw Error(ErrorCode::kMockScriptExhausted,
              "no scripted reply for kind=" +
                  std::string(kind ? to_string(*kind) : "unknown") +
                  " attempt=" + std::to_string(attempt) +
                  " question='" + question.value_or("") + "'");
}

ChatReply ScriptedClient::complete(const ChatRequest& request) {
  ChatReply reply;
  reply.text = reply_text(request);
  reply.usage.input_tokens = count_tokens(request.system) + count_tokens(request.user);
  reply.usage.output_tokens = count_tokens(reply.text);
  reply.raw_request = build_chat_body(request);
  reply.raw_response = mock_completion_body(request.model, reply.text, reply.usage);
  return reply;
}

struct MockServer::Impl {
  explicit Impl(MockScript script) : client(std::move(script)) {}
  ScriptedClient client;
  httplib::Server server;
  std::thread thread;
  std::atomic<std::uint64_t> served{0};
};

MockServer::MockServer(MockScript script, std::string host, int port)
    : impl_(std::make_unique<Impl>(std::move(script))), host_(std::move(host)) {
  impl_->server.Post(R"(.*/chat/completions)", [this](const httplib::Request& req,
                                                       httplib::Response& res) {
    ChatRequest chat;
    try {
      const auto j = nlohmann::json::parse(req.body);
      chat.model = j.value("model", std::string());
      if (j.contains("temperature")) chat.temperature = j["temperature"].get<double>();
      if (j.contains("seed")) chat.seed = j["seed"].get<std::int64_t>();
      for (const auto& msg : j.at("messages")) {
        const auto role = msg.at("role").get<std::string>();
        if (role == "system") chat.system = msg.at("content").get<std::string>();
        if (role == "user") chat.user = msg.at("content").get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      res.set_content(ojson{{"error", e.what()}}.dump(), "application/json");
      return;
    }
    try {
      const auto reply = impl_->client.complete(chat);
      ++impl_->served;
      res.set_content(reply.raw_response, "application/json");
    } catch (const Error& e) {
      res.status = 422;
      res.set_content(ojson{{"error", e.what()}}.dump(), "application/json");
    }
  });
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host_);
  } else if (impl_->server.bind_to_port(host_, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorCode::kConfigInvalid, "mock server cannot bind " + host_);
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/v1";
}

std::uint64_t MockServer::requests_served() const { return impl_->served.load(); }

void MockServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void MockServer::stop() { impl_->server.stop(); }

std::unique_ptr<ChatClient> make_client(const ModelEndpoint& endpoint) {
  endpoint.validate();
  constexpr std::string_view kMock = "mock://";
  if (std::string_view(endpoint.base_url).starts_with(kMock)) {
    return std::make_unique<ScriptedClient>(
        MockScript::load(endpoint.base_url.substr(kMock.size())));
  }
  return std::make_unique<HttpChatClient>(endpoint);
}

}  // namespace ipelicit
