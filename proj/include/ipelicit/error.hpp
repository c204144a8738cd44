#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipelicit {

enum class ErrorCode {
  // ip-core
  kEmptyCandidateSet,
  kEmptyAnswer,
  kNegativeWeight,
  kZeroMass,
  kSumViolation,
  kLengthMismatch,
  kValueOutOfRange,
  kEmptyCredal,
  kCandidateSetMismatch,
  // coherence / mmi / scores / decision
  kEmptyInput,
  kAllZero,
  kInvertedInterval,
  kLowerSumExceedsOne,
  kCandidateSetTooLarge,
  kSupportMismatch,
  kNegativeScore,
  kWeightSumViolation,
  // elicit
  kMissingCandidates,
  kUnknownKind,
  kNoStructuredBlock,
  kCandidateCountMismatch,
  kNumberParse,
  kRetriesExhausted,
  kTransportError,
  kMemberQuorumNotMet,
  kEmptyList,
  // synth
  kNonAlphabetInput,
  kEmptyString,
  kVocabularyExhausted,
  kEnumerationTooLarge,
  // eval
  kDegenerateLabels,
  kAllRefsTied,
  kUnknownEndpoint,
  // campaign
  kDatasetParse,
  kSchemaViolation,
  kEndpointUnreachable,
  kPartialCampaign,
  kMockScriptExhausted,
  kConfigInvalid,
  kRecordParse,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and the Python bindings) can branch on it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ipelicit
