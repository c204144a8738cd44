#include "ipelicit/json_io.hpp"

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

MmiMode mmi_mode_from_string(std::string_view name) {
  for (auto m : {MmiMode::kExactEventEnum, MmiMode::kUpperBound, MmiMode::kIntervalWidth,
                 MmiMode::kPossibilityOrderStat, MmiMode::kPossibilityBinary}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kRecordParse, "unknown MMI mode '" + std::string(name) + "'");
}

template <typename T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::vector<double> doubles(const ojson& j) { return j.get<std::vector<double>>(); }

}  // namespace

ojson to_json(const CandidateSet& candidates) {
  return {{"answers", candidates.answers()},
          {"open_ended", candidates.open_ended()},
          {"case_sensitive", candidates.folding() == AnswerFolding::kCaseSensitive}};
}

CandidateSet candidate_set_from_json(const ojson& j) {
  return CandidateSet::make(j.at("answers").get<std::vector<std::string>>(),
                            j.value("open_ended", false),
                            j.value("case_sensitive", false) ? AnswerFolding::kCaseSensitive
                                                             : AnswerFolding::kCaseInsensitive);
}

ojson to_json(const VerdictReport& verdict) {
  ojson violations = ojson::array();
  for (const auto& v : verdict.violations) {
    violations.push_back({{"code", to_string(v.code)},
                          {"index", v.index},
                          {"observed", v.observed},
                          {"bound", v.bound}});
  }
  return {{"passed", verdict.passed}, {"violations", std::move(violations)}};
}

VerdictReport verdict_from_json(const ojson& j) {
  VerdictReport out;
  for (const auto& v : j.at("violations")) {
    out.add({violation_code_from_string(v.at("code").get<std::string>()),
             v.at("index").get<int>(), v.at("observed").get<double>(),
             v.at("bound").get<double>()});
  }
  if (out.passed != j.at("passed").get<bool>()) {
    throw Error(ErrorCode::kRecordParse, "verdict 'passed' disagrees with its violations");
  }
  return out;
}

ojson to_json(const MmiScore& score) {
  return {{"value", score.value}, {"mode", to_string(score.mode)},
          {"event_count", score.event_count}};
}

MmiScore mmi_score_from_json(const ojson& j) {
  return {j.at("value").get<double>(), mmi_mode_from_string(j.at("mode").get<std::string>()),
          j.at("event_count").get<std::uint64_t>()};
}

ojson to_json(const DecisionOutcome& outcome) {
  return {{"rule", to_string(outcome.rule)},
          {"chosen_index", outcome.chosen_index},
          {"chosen_answer", outcome.chosen_answer},
          {"tie_broken", outcome.tie_broken}};
}

ojson payload_to_json(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> ojson {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PrecisePMF>) {
          return {{"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
        } else if constexpr (std::is_same_v<T, ProbabilityIntervalSet>) {
          return {{"lower", std::vector<double>(p.lower().begin(), p.lower().end())},
                  {"upper", std::vector<double>(p.upper().begin(), p.upper().end())}};
        } else if constexpr (std::is_same_v<T, PossibilityAssignment>) {
          return {{"scores", std::vector<double>(p.raw_scores().begin(), p.raw_scores().end())},
                  {"none_of_above", optional_json(p.none_of_above())}};
        } else if constexpr (std::is_same_v<T, CandidateSet>) {
          return to_json(p);
        } else {
          return {{"confidence", p}};
        }
      },
      payload);
}

Payload payload_from_json(PromptKind kind, const ojson& j,
                          const std::optional<CandidateSet>& candidates) {
  const bool indexed = kind != PromptKind::kCandidates && kind != PromptKind::kVanilla;
  if (indexed && !candidates) {
    throw Error(ErrorCode::kMissingCandidates, "payload needs its candidate set");
  }
  switch (kind) {
    case PromptKind::kDefinetti:
    case PromptKind::kCredal:
      return PrecisePMF(*candidates, doubles(j.at("probs")));
    case PromptKind::kProbint:
      return ProbabilityIntervalSet(*candidates, doubles(j.at("lower")), doubles(j.at("upper")));
    case PromptKind::kPossibility: {
      std::optional<double> nota;
      if (!j.at("none_of_above").is_null()) nota = j["none_of_above"].get<double>();
      return PossibilityAssignment(*candidates, doubles(j.at("scores")), nota);
    }
    case PromptKind::kCandidates:
      return candidate_set_from_json(j);
    case PromptKind::kVanilla:
      return j.at("confidence").get<double>();
  }
  throw Error(ErrorCode::kUnknownKind, "unhandled kind");
}

ojson to_json(const ElicitationResult& result) {
  ojson attempts = ojson::array();
  for (const auto& a : result.attempt_log) {
    attempts.push_back({{"attempt", a.attempt},
                        {"prompt", a.prompt},
                        {"reply", a.reply},
                        {"raw_request", a.raw_request},
                        {"raw_response", a.raw_response},
                        {"usage",
                         {{"input_tokens", a.usage.input_tokens},
                          {"output_tokens", a.usage.output_tokens}}},
                        {"verdict", to_json(a.verdict)},
                        {"parse_error", optional_json(a.parse_error)}});
  }
  const auto usage = result.usage();
  ojson j;
  j["kind"] = to_string(result.kind);
  j["endpoint"] = result.endpoint;
  j["seed"] = optional_json(result.seed);
  j["success"] = result.success;
  j["salvaged"] = result.salvaged;
  j["usage"] = {{"input_tokens", usage.input_tokens}, {"output_tokens", usage.output_tokens}};
  j["attempts"] = std::move(attempts);
  j["payload"] = result.payload ? payload_to_json(*result.payload) : ojson(nullptr);
  j["entropy"] = optional_json(result.entropy);
  j["mmi"] = result.mmi ? to_json(*result.mmi) : ojson(nullptr);
  return j;
}

// The parsed report is not stored; the payload carries the same numbers.
ElicitationResult elicitation_result_from_json(const ojson& j,
                                               const std::optional<CandidateSet>& candidates) {
  ElicitationResult r;
  try {
    r.kind = prompt_kind_from_string(j.at("kind").get<std::string>());
    r.endpoint = j.at("endpoint").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j["seed"].get<std::int64_t>();
    r.success = j.at("success").get<bool>();
    r.salvaged = j.at("salvaged").get<bool>();
    for (const auto& a : j.at("attempts")) {
      AttemptRecord rec;
      rec.attempt = a.at("attempt").get<int>();
      rec.prompt = a.at("prompt").get<std::string>();
      rec.reply = a.at("reply").get<std::string>();
      rec.raw_request = a.at("raw_request").get<std::string>();
      rec.raw_response = a.at("raw_response").get<std::string>();
      rec.usage.input_tokens = a.at("usage").at("input_tokens").get<std::uint64_t>();
      rec.usage.output_tokens = a.at("usage").at("output_tokens").get<std::uint64_t>();
      rec.verdict = verdict_from_json(a.at("verdict"));
      if (!a.at("parse_error").is_null()) rec.parse_error = a["parse_error"].get<std::string>();
      r.attempt_log.push_back(std::move(rec));
    }
    if (!j.at("payload").is_null()) r.payload = payload_from_json(r.kind, j["payload"], candidates);
    if (!j.at("entropy").is_null()) r.entropy = j["entropy"].get<double>();
    if (!j.at("mmi").is_null()) r.mmi = mmi_score_from_json(j["mmi"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kRecordParse, std::string("elicitation result: ") + e.what());
  }
  return r;
}

}  // namespace ipelicit
