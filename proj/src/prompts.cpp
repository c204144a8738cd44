#include "ipelicit/prompts.hpp"

#include <array>
#include <charconv>
#include <utility>

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

constexpr std::string_view kQuestionHeader = "\n\nQuestion: ";
constexpr std::string_view kAnswersHeader = "\n\nAnswers:\n";
constexpr std::string_view kProposedHeader = "\n\nProposed answer: ";
constexpr std::string_view kFormatHeader = "\n\nOutput format:";
constexpr std::string_view kRejectedPrefix = "\n\nAttempt ";
constexpr std::string_view kRejectedInfix = " was rejected: ";

constexpr std::array<std::pair<std::string_view, PromptKind>, 6> kMarkers{{
    {"Assign a buy price", PromptKind::kDefinetti},
    {"Provide a lower and upper probability", PromptKind::kProbint},
    {"would be given as a response", PromptKind::kCredal},
    {"a different answer (not listed)", PromptKind::kPossibility},
    {"all possible correct answers", PromptKind::kCandidates},
    {"that the proposed answer to the question is correct", PromptKind::kVanilla},
}};

std::size_t first_of(std::string_view text, std::size_t from,
                     std::initializer_list<std::string_view> needles) {
  std::size_t best = std::string_view::npos;
  for (auto n : needles) {
    const auto pos = text.find(n, from);
    if (pos < best) best = pos;
  }
  return best;
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kDefinetti: return "definetti";
    case PromptKind::kProbint: return "probint";
    case PromptKind::kCredal: return "credal";
    case PromptKind::kPossibility: return "possibility";
    case PromptKind::kCandidates: return "candidates";
    case PromptKind::kVanilla: return "vanilla";
  }
  return "unknown";
}

PromptKind prompt_kind_from_string(std::string_view name) {
  for (auto k : {PromptKind::kDefinetti, PromptKind::kProbint, PromptKind::kCredal,
                 PromptKind::kPossibility, PromptKind::kCandidates,
                 PromptKind::kVanilla}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kUnknownKind, "unknown prompt kind '" + std::string(name) + "'");
}

std::string render_prompt(PromptKind kind, std::string_view question,
                          const std::optional<CandidateSet>& candidates) {
  if (question.empty()) {
    throw Error(ErrorCode::kEmptyInput, "question must be non-empty");
  }
  const bool needs_candidates =
      kind != PromptKind::kCandidates && kind != PromptKind::kVanilla;
  if (needs_candidates && (!candidates || candidates->size() == 0)) {
    throw Error(ErrorCode::kMissingCandidates,
                std::string(to_string(kind)) + " prompts need a candidate set");
  }
  std::string out(prompt_template(kind));
  out += kQuestionHeader;
  out += question;
  if (kind == PromptKind::kVanilla) {
    if (candidates && candidates->size() > 0) {
      out += kProposedHeader;
      out += (*candidates)[0];
    }
  } else if (needs_candidates) {
    out += kAnswersHeader;
    for (std::size_t i = 0; i < candidates->size(); ++i) {
      if (i > 0) out += '\n';
      out += std::to_string(i + 1) + ". " + (*candidates)[i];
    }
  }
  out += "\n\n";
  out += output_format_instruction(kind);
  return out;
}

std::string render_retry_feedback(int rejected_attempt, std::string_view reason) {
  std::string out(kRejectedPrefix);
  out += std::to_string(rejected_attempt);
  out += kRejectedInfix;
  out += reason;
  out += "\nAnswer again, fixing these problems, in the required output format.";
  return out;
}

std::optional<PromptKind> detect_prompt_kind(std::string_view prompt) {
  for (const auto& [marker, kind] : kMarkers) {
    if (prompt.find(marker) != std::string_view::npos) return kind;
  }
  return std::nullopt;
}

std::optional<std::string> extract_question(std::string_view prompt) {
  const auto start = prompt.find(kQuestionHeader);
  if (start == std::string_view::npos) return std::nullopt;
  const auto from = start + kQuestionHeader.size();
  const auto end = first_of(prompt, from, {kAnswersHeader, kProposedHeader, kFormatHeader});
  return std::string(prompt.substr(from, end == std::string_view::npos ? end : end - from));
}

std::vector<std::string> extract_prompt_candidates(std::string_view prompt) {
  std::vector<std::string> out;
  auto start = prompt.find(kAnswersHeader);
  if (start == std::string_view::npos) {
    start = prompt.find(kProposedHeader);
    if (start == std::string_view::npos) return out;
    const auto from = start + kProposedHeader.size();
    const auto end = prompt.find(kFormatHeader, from);
    out.emplace_back(prompt.substr(from, end == std::string_view::npos ? end : end - from));
    return out;
  }
  const auto from = start + kAnswersHeader.size();
  const auto end = prompt.find(kFormatHeader, from);
  std::string_view block = prompt.substr(from, end == std::string_view::npos ? end : end - from);
  while (!block.empty()) {
    const auto nl = block.find('\n');
    std::string_view line = block.substr(0, nl);
    const auto dot = line.find(". ");
    if (dot != std::string_view::npos) out.emplace_back(line.substr(dot + 2));
    if (nl == std::string_view::npos) break;
    block.remove_prefix(nl + 1);
  }
  return out;
}

int detect_attempt(std::string_view prompt) {
  int rejected = 0;
  std::size_t pos = 0;
  while ((pos = prompt.find(kRejectedPrefix, pos)) != std::string_view::npos) {
    pos += kRejectedPrefix.size();
    int k = 0;
    auto [ptr, ec] = std::from_chars(prompt.data() + pos, prompt.data() + prompt.size(), k);
    if (ec == std::errc() &&
        std::string_view(ptr, static_cast<std::size_t>(prompt.data() + prompt.size() - ptr))
            .starts_with(kRejectedInfix)) {
      rejected = k;
    }
  }
  return rejected + 1;
}

}  // namespace ipelicit
