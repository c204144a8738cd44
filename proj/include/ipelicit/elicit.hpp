#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipelicit/client.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/report.hpp"

namespace ipelicit {

struct ElicitOptions {
  int max_attempts = 5;
  bool enforce_upper = false;
  // Salvage mode: a parsed but incoherent price or probability vector on the
  // last attempt is renormalized instead of failing. Flagged in the result.
  bool renormalize_final_attempt = false;
  std::string system_prompt;
  // Deduplication of generated candidate lists.
  AnswerFolding folding = AnswerFolding::kCaseInsensitive;
};

// RetriesExhausted, carrying the full attempt log.
class ElicitationFailure : public Error {
 public:
  explicit ElicitationFailure(ElicitationResult result);
  const ElicitationResult& result() const noexcept { return result_; }

 private:
  ElicitationResult result_;
};

// Request, parse and verify until the kind's verifier passes or the budget
// runs out. Rejected replies are re-asked at once with the violations
// appended; transport errors propagate from the client untouched.
//
// On success, definetti results carry entropy(p_hat) and probint results the
// upper-bound MMI.
ElicitationResult elicit_with_retry(ChatClient& client, const ModelEndpoint& endpoint,
                                    PromptKind kind, std::string_view question,
                                    const std::optional<CandidateSet>& candidates,
                                    const ElicitOptions& options = {});

struct EnsembleMember {
  ChatClient* client = nullptr;
  ModelEndpoint endpoint;  // seed here differentiates same-model members
};

// Provenance label for an ensemble member: endpoint key plus seed, marked as
// an independent sample when the endpoint ignores seeds.
std::string member_tag(const ModelEndpoint& endpoint, std::size_t index);

struct EnsembleResult {
  std::vector<ElicitationResult> members;  // one per member, in order
  std::optional<CredalSet> credal;         // absent when the quorum failed
  std::optional<std::string> error;
};

// Credal elicitation once per member over the same candidate set. A quorum
// of 0 means every member must succeed. Never throws for member failures.
EnsembleResult run_credal_ensemble(const std::vector<EnsembleMember>& members,
                                   std::string_view question,
                                   const CandidateSet& candidates,
                                   const ElicitOptions& options = {},
                                   std::size_t quorum = 0);

// As above, but throws MemberQuorumNotMet instead of returning no set.
CredalSet elicit_credal_ensemble(const std::vector<EnsembleMember>& members,
                                 std::string_view question,
                                 const CandidateSet& candidates,
                                 const ElicitOptions& options = {},
                                 std::size_t quorum = 0);

// Numbered-list generation of an open-ended candidate set.
CandidateSet generate_candidates(ChatClient& client, const ModelEndpoint& endpoint,
                                 std::string_view question,
                                 const ElicitOptions& options = {});

}  // namespace ipelicit
