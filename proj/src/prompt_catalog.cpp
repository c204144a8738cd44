// Prompt catalog. The instruction texts below are fixed; changing a single
// byte changes what every recorded campaign asked the model.

#include "ipelicit/prompts.hpp"

namespace ipelicit {
namespace {

constexpr std::string_view kDefinetti =
    "Assign a buy price (between $0.00 and $1.00) for each answer representing the "
    "maximum amount you would pay for a bet on that answer being correct.\n"
    "If an answer is correct, the bet pays $1.00; if incorrect, it pays $0.00, and "
    "the price paid is lost.\n"
    "Assign prices that maximize expected profit, taking into account how each "
    "answer might be correct or incorrect under reasonable alternative "
    "interpretations of the question (e.g., unclear entities, ambiguous events, or "
    "uncertainty about required answer format or type), and how multiple answer "
    "options can be equally correct.\n"
    "The prices must sum to exactly $1.00 across all answers.";

constexpr std::string_view kProbint =
    "Provide a lower and upper probability (each between 0.0 and 1.0) indicating "
    "how likely the answer is correct. Interpret the probabilities as follows:\n"
    "• Lower Probability: the smallest probability you consider plausible that the "
    "answer is correct.\n"
    "• Upper Probability: the largest probability you consider defensible that the "
    "answer is correct.\n"
    "The sum of all lower probabilities across all answers must not exceed 1.0.";

constexpr std::string_view kCredal =
    "Assign a probability (between 0.0 and 1.0) representing how likely it is that "
    "the answer would be given as a response to the question.\n"
    "A correct answer should generally receive a higher probability than an "
    "incorrect one. Likelihood may vary based on reasonable interpretations of the "
    "question (e.g., ambiguity in scope, answer type, entity interpretation, or "
    "contextual assumptions).\n"
    "The sum of all probabilities must not exceed 1.0.";

constexpr std::string_view kPossibility =
    "Provide a possibility score which captures how plausible the answer correctly "
    "answers the question.\n"
    "Then, provide a possibility score how plausible it is that a different answer "
    "(not listed) could be correct.\n"
    "The possibility should be between 0.0 and 1.0. A possibility score of 1.0 "
    "means \"fully plausible,\" and 0.0 means \"impossible.\"";

constexpr std::string_view kCandidates =
    "Given the question below, generate a list of all possible correct answers, "
    "taking into account different reasonable interpretations of the question.\n"
    "\n"
    "Provide the answers as a numbered list, with each answer on its own line.\n"
    "Each answer must be concise text only, with no explanations or additional "
    "wording.\n"
    "Do not include duplicates or answers that refer to the same entity or "
    "concept.\n"
    "For example:\n"
    "1. <answer one as concise text>\n"
    "2. <answer two as concise text>\n"
    "...";

constexpr std::string_view kVanilla =
    "Provide your confidence (between 0.0 and 1.0) that the proposed answer to the "
    "question is correct. If no answer is proposed, answer the question yourself "
    "and provide your confidence that your answer is correct.";

constexpr std::string_view kFormatDefinetti =
    "Output format: end your reply with a fenced block containing exactly one line "
    "per answer, written as <answer number>|price=<decimal>. For example:\n"
    "```\n1|price=0.60\n2|price=0.40\n```";

constexpr std::string_view kFormatProbint =
    "Output format: end your reply with a fenced block containing exactly one line "
    "per answer, written as <answer number>|lower=<decimal>|upper=<decimal>. For "
    "example:\n"
    "```\n1|lower=0.20|upper=0.50\n2|lower=0.30|upper=0.70\n```";

constexpr std::string_view kFormatCredal =
    "Output format: end your reply with a fenced block containing exactly one line "
    "per answer, written as <answer number>|prob=<decimal>. For example:\n"
    "```\n1|prob=0.70\n2|prob=0.30\n```";

constexpr std::string_view kFormatPossibility =
    "Output format: end your reply with a fenced block containing exactly one line "
    "per answer, written as <answer number>|pos=<decimal>, followed by one line "
    "NOTA|pos=<decimal> for a different answer (not listed). For example:\n"
    "```\n1|pos=1.00\n2|pos=0.40\nNOTA|pos=0.10\n```";

constexpr std::string_view kFormatCandidates =
    "Output format: the numbered list only, one answer per line.";

constexpr std::string_view kFormatVanilla =
    "Output format: end your reply with a fenced block containing exactly one line "
    "CONF|conf=<decimal>. For example:\n"
    "```\nCONF|conf=0.80\n```";

}  // namespace

std::string_view prompt_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::kDefinetti: return kDefinetti;
    case PromptKind::kProbint: return kProbint;
    case PromptKind::kCredal: return kCredal;
    case PromptKind::kPossibility: return kPossibility;
    case PromptKind::kCandidates: return kCandidates;
    case PromptKind::kVanilla: return kVanilla;
  }
  return {};
}

std::string_view output_format_instruction(PromptKind kind) {
  switch (kind) {
    case PromptKind::kDefinetti: return kFormatDefinetti;
    case PromptKind::kProbint: return kFormatProbint;
    case PromptKind::kCredal: return kFormatCredal;
    case PromptKind::kPossibility: return kFormatPossibility;
    case PromptKind::kCandidates: return kFormatCandidates;
    case PromptKind::kVanilla: return kFormatVanilla;
  }
  return {};
}

}  // namespace ipelicit
