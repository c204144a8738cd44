#include "ipelicit/elicit.hpp"

#include <numeric>

#include "ipelicit/coherence.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/scores.hpp"

namespace ipelicit {
namespace {

std::string failure_message(const ElicitationResult& r) {
  std::string msg = std::string(to_string(r.kind)) + " elicitation from " + r.endpoint +
                    " failed after " + std::to_string(r.attempts()) + " attempt(s)";
  if (!r.attempt_log.empty()) {
    const auto& last = r.attempt_log.back();
    msg += "; last: " + (last.parse_error ? *last.parse_error : last.verdict.describe());
  }
  return msg;
}

bool is_pmf_kind(PromptKind kind) {
  return kind == PromptKind::kDefinetti || kind == PromptKind::kCredal;
}

// Renormalizes a parsed price vector in place when that is possible at all.
bool salvage(StructuredReport& report) {
  if (!is_pmf_kind(report.kind)) return false;
  double total = 0.0;
  for (double v : report.values) {
    if (v < 0.0) return false;
    total += v;
  }
  if (!(total > 0.0)) return false;
  for (double& v : report.values) v /= total;
  return true;
}

void attach_scores(ElicitationResult& result) {
  if (result.kind == PromptKind::kDefinetti) {
    result.entropy = entropy(std::get<PrecisePMF>(*result.payload));
  } else if (result.kind == PromptKind::kProbint) {
    result.mmi = mmi_upper_bound(std::get<ProbabilityIntervalSet>(*result.payload));
  }
}

}  // namespace

ElicitationFailure::ElicitationFailure(ElicitationResult result)
    : Error(ErrorCode::kRetriesExhausted, failure_message(result)),
      result_(std::move(result)) {}

ElicitationResult elicit_with_retry(ChatClient& client, const ModelEndpoint& endpoint,
                                    PromptKind kind, std::string_view question,
                                    const std::optional<CandidateSet>& candidates,
                                    const ElicitOptions& options) {
  if (options.max_attempts < 1) {
    throw Error(ErrorCode::kConfigInvalid, "max_attempts must be at least 1");
  }
  const std::string base_prompt = render_prompt(kind, question, candidates);

  ElicitationResult result;
  result.kind = kind;
  result.endpoint = endpoint.key();
  result.seed = endpoint.seed;

  std::string prompt = base_prompt;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    ChatRequest request;
    request.system = options.system_prompt;
    request.user = prompt;
    request.model = endpoint.model_id;
    request.temperature = endpoint.temperature;
    if (endpoint.seed_supported) request.seed = endpoint.seed;
    ChatReply reply = client.complete(request);

    AttemptRecord record;
    record.attempt = attempt;
    record.prompt = prompt;
    record.reply = reply.text;
    record.raw_request = std::move(reply.raw_request);
    record.raw_response = std::move(reply.raw_response);
    record.usage = reply.usage;

    std::optional<StructuredReport> report;
    try {
      report = parse_structured_report(kind, record.reply, candidates, options.folding);
      record.verdict = verify_report(*report, candidates, options.enforce_upper);
    } catch (const Error& e) {
      record.parse_error = e.what();
      record.verdict = VerdictReport{};
      record.verdict.add({ViolationCode::kParse, -1, 0.0, 0.0});
    }

    const bool last = attempt == options.max_attempts;
    if (!record.verdict.passed && last && report && options.renormalize_final_attempt &&
        salvage(*report)) {
      result.salvaged = true;
    }
    const bool accepted = record.verdict.passed || result.salvaged;
    const std::string reason =
        record.parse_error ? *record.parse_error : record.verdict.describe();
    result.attempt_log.push_back(std::move(record));

    if (accepted) {
      result.success = true;
      result.report = std::move(report);
      result.payload = build_payload(*result.report, candidates);
      attach_scores(result);
      return result;
    }
    prompt = base_prompt + render_retry_feedback(attempt, reason);
  }
  throw ElicitationFailure(std::move(result));
}

std::string member_tag(const ModelEndpoint& endpoint, std::size_t index) {
  if (!endpoint.seed) return endpoint.key() + "#member=" + std::to_string(index);
  if (!endpoint.seed_supported) {
    return endpoint.key() + "#sample=" + std::to_string(*endpoint.seed) +
           " (independent-sample)";
  }
  return endpoint.key() + "#seed=" + std::to_string(*endpoint.seed);
}

EnsembleResult run_credal_ensemble(const std::vector<EnsembleMember>& members,
                                   std::string_view question,
                                   const CandidateSet& candidates,
                                   const ElicitOptions& options, std::size_t quorum) {
  if (members.empty()) throw Error(ErrorCode::kEmptyCredal, "ensemble has no members");
  const std::size_t required = quorum == 0 ? members.size() : quorum;

  EnsembleResult out;
  std::vector<PrecisePMF> pmfs;
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    try {
      auto r = elicit_with_retry(*m.client, m.endpoint, PromptKind::kCredal, question,
                                 candidates, options);
      pmfs.push_back(std::get<PrecisePMF>(*r.payload));
      tags.push_back(member_tag(m.endpoint, i));
      out.members.push_back(std::move(r));
    } catch (const ElicitationFailure& f) {
      out.members.push_back(f.result());
    }
  }
  if (pmfs.size() < required) {
    out.error = std::to_string(pmfs.size()) + " of " +
                std::to_string(members.size()) + " members succeeded, quorum is " +
                std::to_string(required);
    return out;
  }
  out.credal.emplace(candidates, std::move(pmfs), std::move(tags));
  return out;
}

CredalSet elicit_credal_ensemble(const std::vector<EnsembleMember>& members,
                                 std::string_view question,
                                 const CandidateSet& candidates,
                                 const ElicitOptions& options, std::size_t quorum) {
  auto r = run_credal_ensemble(members, question, candidates, options, quorum);
  if (!r.credal) throw Error(ErrorCode::kMemberQuorumNotMet, *r.error);
  return std::move(*r.credal);
}

CandidateSet generate_candidates(ChatClient& client, const ModelEndpoint& endpoint,
                                 std::string_view question,
                                 const ElicitOptions& options) {
  auto r = elicit_with_retry(client, endpoint, PromptKind::kCandidates, question,
                             std::nullopt, options);
  return std::get<CandidateSet>(*r.payload);
}

}  // namespace ipelicit
