#include "ipelicit/error.hpp"

namespace ipelicit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::kEmptyAnswer: return "EmptyAnswer";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kZeroMass: return "ZeroMass";
    case ErrorCode::kSumViolation: return "SumViolation";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::kEmptyCredal: return "EmptyCredal";
    case ErrorCode::kCandidateSetMismatch: return "CandidateSetMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kAllZero: return "AllZero";
    case ErrorCode::kInvertedInterval: return "InvertedInterval";
    case ErrorCode::kLowerSumExceedsOne: return "LowerSumExceedsOne";
    case ErrorCode::kCandidateSetTooLarge: return "CandidateSetTooLarge";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kNegativeScore: return "NegativeScore";
    case ErrorCode::kWeightSumViolation: return "WeightSumViolation";
    case ErrorCode::kMissingCandidates: return "MissingCandidates";
    case ErrorCode::kUnknownKind: return "UnknownKind";
    case ErrorCode::kNoStructuredBlock: return "NoStructuredBlock";
    case ErrorCode::kCandidateCountMismatch: return "CandidateCountMismatch";
    case ErrorCode::kNumberParse: return "NumberParse";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kMemberQuorumNotMet: return "MemberQuorumNotMet";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kNonAlphabetInput: return "NonAlphabetInput";
    case ErrorCode::kEmptyString: return "EmptyString";
    case ErrorCode::kVocabularyExhausted: return "VocabularyExhausted";
    case ErrorCode::kEnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kAllRefsTied: return "AllRefsTied";
    case ErrorCode::kUnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::kDatasetParse: return "DatasetParse";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kEndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::kPartialCampaign: return "PartialCampaign";
    case ErrorCode::kMockScriptExhausted: return "MockScriptExhausted";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kRecordParse: return "RecordParse";
  }
  return "Unknown";
}

}  // namespace ipelicit
