#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipelicit/coherence.hpp"
#include "ipelicit/types.hpp"

namespace ipelicit {

enum class PromptKind { kDefinetti, kProbint, kCredal, kPossibility, kCandidates, kVanilla };

std::string_view to_string(PromptKind kind);
// Throws UnknownKind.
PromptKind prompt_kind_from_string(std::string_view name);

// Verbatim instruction text for each kind (see src/prompt_catalog.cpp).
std::string_view prompt_template(PromptKind kind);

// The fenced-block syntax each kind must reply with.
std::string_view output_format_instruction(PromptKind kind);

// Template, question, numbered candidate list and output-format instruction.
// Candidates are required for every kind except `candidates` and `vanilla`;
// for `vanilla` the first candidate, when given, is the proposed answer.
std::string render_prompt(PromptKind kind, std::string_view question,
                          const std::optional<CandidateSet>& candidates);

// Appended to the original prompt when a reply is rejected.
std::string render_retry_feedback(int rejected_attempt, std::string_view reason);

// Inverse helpers for mock endpoints that only see the prompt text.
std::optional<PromptKind> detect_prompt_kind(std::string_view prompt);
std::optional<std::string> extract_question(std::string_view prompt);
std::vector<std::string> extract_prompt_candidates(std::string_view prompt);
int detect_attempt(std::string_view prompt);

}  // namespace ipelicit
