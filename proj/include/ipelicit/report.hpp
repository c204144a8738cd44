#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ipelicit/coherence.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/prompts.hpp"
#include "ipelicit/types.hpp"

namespace ipelicit {

// Numbers extracted from a model reply, before any coherence check.
struct StructuredReport {
  PromptKind kind = PromptKind::kDefinetti;
  std::vector<double> values;          // price / prob / pos, one per candidate
  std::vector<double> lower;           // probint
  std::vector<double> upper;           // probint
  std::optional<double> none_of_above; // possibility
  std::optional<double> confidence;    // vanilla
  std::vector<std::string> answers;    // candidates (deduplicated)
  AnswerFolding folding = AnswerFolding::kCaseInsensitive;  // candidates

  bool operator==(const StructuredReport&) const = default;
};

// Parses the fenced `<index>|<field>=<value>` block (or, for `candidates`,
// the numbered list). Never fills in a missing row.
//
// Errors: NoStructuredBlock, CandidateCountMismatch, NumberParse,
// ValueOutOfRange, EmptyList. Prices and credal probabilities are not
// range-checked here; the axiom verifier reports them.
StructuredReport parse_structured_report(
    PromptKind kind, std::string_view raw, const std::optional<CandidateSet>& candidates,
    AnswerFolding folding = AnswerFolding::kCaseInsensitive);

// The verifier for the report's kind: axioms for definetti and credal, lower
// (and optionally upper) sums for probint, positivity for possibility.
VerdictReport verify_report(const StructuredReport& report,
                            const std::optional<CandidateSet>& candidates,
                            bool enforce_upper = false);

using Payload = std::variant<PrecisePMF, ProbabilityIntervalSet,
                             PossibilityAssignment, CandidateSet, double>;

// Typed payload for a verified report. For vanilla the payload is the
// confidence itself.
Payload build_payload(const StructuredReport& report,
                      const std::optional<CandidateSet>& candidates);

struct Usage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;

  Usage& operator+=(const Usage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    return *this;
  }
  bool operator==(const Usage&) const = default;
};

struct AttemptRecord {
  int attempt = 1;
  std::string prompt;
  std::string reply;
  std::string raw_request;   // wire body as sent, empty for in-process mocks
  std::string raw_response;  // wire body as received
  Usage usage;
  VerdictReport verdict;
  std::optional<std::string> parse_error;
};

struct ElicitationResult {
  PromptKind kind = PromptKind::kDefinetti;
  std::string endpoint;  // ModelEndpoint::key()
  std::optional<std::int64_t> seed;
  bool success = false;
  bool salvaged = false;  // final attempt renormalized instead of re-asked
  std::vector<AttemptRecord> attempt_log;
  std::optional<StructuredReport> report;
  std::optional<Payload> payload;
  std::optional<double> entropy;  // definetti
  std::optional<MmiScore> mmi;    // probint upper bound

  int attempts() const { return static_cast<int>(attempt_log.size()); }
  Usage usage() const;
  std::vector<VerdictReport> verdicts() const;
};

}  // namespace ipelicit
