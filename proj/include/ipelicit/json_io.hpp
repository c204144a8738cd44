#pragma once

#include <optional>

#include <json.hpp>

#include "ipelicit/decision.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/report.hpp"

namespace ipelicit {

using ojson = nlohmann::ordered_json;

// Lossless JSON forms of the library types. Key order is fixed so that
// serialized records are byte-stable; doubles round-trip exactly.

ojson to_json(const CandidateSet& candidates);
CandidateSet candidate_set_from_json(const ojson& j);

ojson to_json(const VerdictReport& verdict);
VerdictReport verdict_from_json(const ojson& j);

ojson to_json(const MmiScore& score);
MmiScore mmi_score_from_json(const ojson& j);

ojson to_json(const DecisionOutcome& outcome);

ojson payload_to_json(const Payload& payload);
// Rebuilds a payload; candidate-indexed kinds need the candidate set.
Payload payload_from_json(PromptKind kind, const ojson& j,
                          const std::optional<CandidateSet>& candidates);

ojson to_json(const ElicitationResult& result);
ElicitationResult elicitation_result_from_json(const ojson& j,
                                               const std::optional<CandidateSet>& candidates);

}  // namespace ipelicit
