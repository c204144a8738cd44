#include "ipelicit/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include "ipelicit/error.hpp"
#include "ipelicit/scores.hpp"

namespace ipelicit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (true) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto p = text.find(sep);
    parts.push_back(text.substr(0, p));
    if (p == std::string_view::npos) break;
    text.remove_prefix(p + 1);
  }
  return parts;
}

bool is_fence(std::string_view line) { return trim(line).starts_with("```"); }

// Lines of the last fenced block; an unterminated final fence runs to the end.
std::optional<std::vector<std::string_view>> last_fenced_block(std::string_view raw) {
  const auto lines = split_lines(raw);
  std::optional<std::vector<std::string_view>> found;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i])) continue;
    std::vector<std::string_view> body;
    std::size_t j = i + 1;
    for (; j < lines.size() && !is_fence(lines[j]); ++j) body.push_back(lines[j]);
    found = std::move(body);
    i = j;
  }
  return found;
}

double parse_decimal(std::string_view text, bool allow_dollar) {
  auto v = trim(text);
  if (allow_dollar && v.starts_with('$')) v.remove_prefix(1);
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kNumberParse, "not a decimal number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(out)) {
    throw Error(ErrorCode::kValueOutOfRange, "non-finite number '" + std::string(text) + "'");
  }
  return out;
}

void require_unit(double v, std::string_view what) {
  if (v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::kValueOutOfRange,
                std::string(what) + " " + std::to_string(v) + " outside [0,1]");
  }
}

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

struct Row {
  std::string key;  // "1", "2", ... or NOTA / CONF
  std::map<std::string, std::string_view> fields;
};

std::vector<Row> parse_rows(const std::vector<std::string_view>& block) {
  std::vector<Row> rows;
  for (auto line : block) {
    line = trim(line);
    if (line.empty()) continue;
    const auto parts = split(line, '|');
    if (parts.size() < 2) {
      throw Error(ErrorCode::kNoStructuredBlock, "malformed row '" + std::string(line) + "'");
    }
    Row row;
    row.key = upper_ascii(trim(parts[0]));
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto field = trim(parts[i]);
      const auto eq = field.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kNoStructuredBlock,
                    "field without '=' in row '" + std::string(line) + "'");
      }
      std::string name(trim(field.substr(0, eq)));
      for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      row.fields[name] = field.substr(eq + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view require_field(const Row& row, const std::string& name) {
  const auto it = row.fields.find(name);
  if (it == row.fields.end()) {
    throw Error(ErrorCode::kNoStructuredBlock,
                "row " + row.key + " is missing field '" + name + "'");
  }
  return it->second;
}

// Maps indexed rows onto candidate slots; every slot exactly once.
std::vector<const Row*> align_rows(const std::vector<Row>& rows, std::size_t n) {
  std::vector<const Row*> slots(n, nullptr);
  std::size_t indexed = 0;
  for (const auto& row : rows) {
    if (row.key == "NOTA" || row.key == "CONF") continue;
    std::size_t idx = 0;
    const char* end = row.key.data() + row.key.size();
    auto [ptr, ec] = std::from_chars(row.key.data(), end, idx);
    if (row.key.empty() || ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kNoStructuredBlock, "bad row index '" + row.key + "'");
    }
    if (idx < 1 || idx > n) {
      throw Error(ErrorCode::kCandidateCountMismatch,
                  "row index " + row.key + " outside 1.." + std::to_string(n));
    }
    if (slots[idx - 1] != nullptr) {
      throw Error(ErrorCode::kCandidateCountMismatch, "duplicate row " + row.key);
    }
    slots[idx - 1] = &row;
    ++indexed;
  }
  if (indexed != n) {
    throw Error(ErrorCode::kCandidateCountMismatch,
                "expected " + std::to_string(n) + " rows, got " + std::to_string(indexed));
  }
  return slots;
}

std::string clean_listed_answer(std::string_view text) {
  auto t = trim(text);
  auto strip_pair = [&t](std::string_view open, std::string_view close) {
    if (t.size() >= open.size() + close.size() && t.starts_with(open) && t.ends_with(close)) {
      t = trim(t.substr(open.size(), t.size() - open.size() - close.size()));
      return true;
    }
    return false;
  };
  while (strip_pair("**", "**") || strip_pair("\"", "\"") || strip_pair("`", "`")) {
  }
  return std::string(t);
}

StructuredReport parse_candidate_list(std::string_view raw, AnswerFolding folding) {
  StructuredReport report;
  report.kind = PromptKind::kCandidates;
  report.folding = folding;
  std::vector<std::string> answers;
  bool saw_numbered = false;
  for (auto line : split_lines(raw)) {
    line = trim(line);
    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits == 0 || digits + 1 >= line.size()) continue;
    if (line[digits] != '.' && line[digits] != ')') continue;
    if (!std::isspace(static_cast<unsigned char>(line[digits + 1]))) continue;
    saw_numbered = true;
    std::string answer = clean_listed_answer(line.substr(digits + 1));
    if (!answer.empty()) answers.push_back(std::move(answer));
  }
  if (!saw_numbered) {
    throw Error(ErrorCode::kNoStructuredBlock, "reply contains no numbered list");
  }
  if (answers.empty()) {
    throw Error(ErrorCode::kEmptyList, "numbered list has no usable answers");
  }
  report.answers = CandidateSet::make(std::move(answers), true, folding).answers();
  return report;
}

}  // namespace

StructuredReport parse_structured_report(PromptKind kind, std::string_view raw,
                                         const std::optional<CandidateSet>& candidates,
                                         AnswerFolding folding) {
  if (kind == PromptKind::kCandidates) return parse_candidate_list(raw, folding);

  const auto block = last_fenced_block(raw);
  if (!block) throw Error(ErrorCode::kNoStructuredBlock, "reply has no fenced block");
  const auto rows = parse_rows(*block);

  StructuredReport report;
  report.kind = kind;

  if (kind == PromptKind::kVanilla) {
    const Row* conf = nullptr;
    for (const auto& row : rows) {
      if (row.key != "CONF") {
        throw Error(ErrorCode::kNoStructuredBlock, "unexpected row '" + row.key + "'");
      }
      if (conf != nullptr) throw Error(ErrorCode::kNoStructuredBlock, "duplicate CONF row");
      conf = &row;
    }
    if (conf == nullptr) throw Error(ErrorCode::kNoStructuredBlock, "missing CONF row");
    const double c = parse_decimal(require_field(*conf, "conf"), false);
    require_unit(c, "confidence");
    report.confidence = c;
    return report;
  }

  if (!candidates) {
    throw Error(ErrorCode::kMissingCandidates, "parsing needs the candidate set");
  }
  const std::size_t n = candidates->size();
  const auto slots = align_rows(rows, n);

  switch (kind) {
    case PromptKind::kDefinetti:
    case PromptKind::kCredal: {
      const std::string field = kind == PromptKind::kDefinetti ? "price" : "prob";
      for (const Row* row : slots) {
        report.values.push_back(
            parse_decimal(require_field(*row, field), kind == PromptKind::kDefinetti));
      }
      break;
    }
    case PromptKind::kProbint: {
      for (const Row* row : slots) {
        const double lo = parse_decimal(require_field(*row, "lower"), false);
        const double hi = parse_decimal(require_field(*row, "upper"), false);
        require_unit(lo, "lower probability");
        require_unit(hi, "upper probability");
        if (lo > hi) {
          throw Error(ErrorCode::kValueOutOfRange,
                      "row " + row->key + " has lower > upper");
        }
        report.lower.push_back(lo);
        report.upper.push_back(hi);
      }
      break;
    }
    case PromptKind::kPossibility: {
      for (const Row* row : slots) {
        const double v = parse_decimal(require_field(*row, "pos"), false);
        require_unit(v, "possibility");
        report.values.push_back(v);
      }
      const Row* nota = nullptr;
      for (const auto& row : rows) {
        if (row.key == "NOTA") {
          if (nota != nullptr) {
            throw Error(ErrorCode::kCandidateCountMismatch, "duplicate NOTA row");
          }
          nota = &row;
        }
      }
      if (nota == nullptr) {
        throw Error(ErrorCode::kCandidateCountMismatch, "missing NOTA row");
      }
      const double v = parse_decimal(require_field(*nota, "pos"), false);
      require_unit(v, "none-of-the-above possibility");
      report.none_of_above = v;
      break;
    }
    default:
      break;
  }
  return report;
}

VerdictReport verify_report(const StructuredReport& report,
                            const std::optional<CandidateSet>& candidates,
                            bool enforce_upper) {
  switch (report.kind) {
    case PromptKind::kDefinetti:
    case PromptKind::kCredal:
      return verify_axioms(report.values);
    case PromptKind::kProbint:
      return verify_interval_coherence(
          ProbabilityIntervalSet(*candidates, report.lower, report.upper), enforce_upper);
    case PromptKind::kPossibility:
      return verify_possibility(
          PossibilityAssignment(*candidates, report.values, report.none_of_above));
    case PromptKind::kCandidates: {
      VerdictReport v;
      if (report.answers.empty()) v.add({ViolationCode::kEmptyList, -1, 0.0, 1.0});
      return v;
    }
    case PromptKind::kVanilla:
      return {};
  }
  return {};
}

Payload build_payload(const StructuredReport& report,
                      const std::optional<CandidateSet>& candidates) {
  switch (report.kind) {
    case PromptKind::kDefinetti:
    case PromptKind::kCredal:
      return PrecisePMF(*candidates, report.values);
    case PromptKind::kProbint:
      return ProbabilityIntervalSet(*candidates, report.lower, report.upper);
    case PromptKind::kPossibility:
      return PossibilityAssignment(*candidates, report.values, report.none_of_above);
    case PromptKind::kCandidates:
      return CandidateSet::make(report.answers, true, report.folding);
    case PromptKind::kVanilla:
      return *report.confidence;
  }
  throw Error(ErrorCode::kUnknownKind, "unhandled kind");
}

Usage ElicitationResult::usage() const {
  Usage total;
  for (const auto& a : attempt_log) total += a.usage;
  return total;
}

std::vector<VerdictReport> ElicitationResult::verdicts() const {
  std::vector<VerdictReport> out;
  out.reserve(attempt_log.size());
  for (const auto& a : attempt_log) out.push_back(a.verdict);
  return out;
}

}  // namespace ipelicit
