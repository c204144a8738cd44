#include "ipelicit/coherence.hpp"

#include <cmath>
#include <sstream>

#include "ipelicit/error.hpp"

namespace ipelicit {

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::kNegative: return "NEGATIVE";
    case ViolationCode::kAboveOne: return "ABOVE_ONE";
    case ViolationCode::kSum: return "SUM";
    case ViolationCode::kLowerSum: return "LOWER_SUM";
    case ViolationCode::kUpperSum: return "UPPER_SUM";
    case ViolationCode::kAllZero: return "ALL_ZERO";
    case ViolationCode::kParse: return "PARSE";
    case ViolationCode::kEmptyList: return "EMPTY_LIST";
  }
  return "UNKNOWN";
}

ViolationCode violation_code_from_string(std::string_view name) {
  for (auto c : {ViolationCode::kNegative, ViolationCode::kAboveOne,
                 ViolationCode::kSum, ViolationCode::kLowerSum,
                 ViolationCode::kUpperSum, ViolationCode::kAllZero,
                 ViolationCode::kParse, ViolationCode::kEmptyList}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::kRecordParse, "unknown violation code " + std::string(name));
}

std::string VerdictReport::describe() const {
  if (passed) return "ok";
  std::ostringstream out;
  bool first = true;
  for (const auto& v : violations) {
    if (!first) out << "; ";
    first = false;
    out << to_string(v.code);
    if (v.index >= 0) out << " at answer " << (v.index + 1);
    switch (v.code) {
      case ViolationCode::kNegative:
        out << " (value " << v.observed << " must be >= " << v.bound << ")";
        break;
      case ViolationCode::kAboveOne:
        out << " (value " << v.observed << " must be <= " << v.bound << ")";
        break;
      case ViolationCode::kSum:
        out << " (sum " << v.observed << " must equal " << v.bound << ")";
        break;
      case ViolationCode::kLowerSum:
        out << " (sum of lower probabilities " << v.observed
            << " must not exceed " << v.bound << ")";
        break;
      case ViolationCode::kUpperSum:
        out << " (sum of upper probabilities " << v.observed
            << " must be at least " << v.bound << ")";
        break;
      case ViolationCode::kAllZero:
        out << " (at least one score must be positive)";
        break;
      case ViolationCode::kParse:
      case ViolationCode::kEmptyList:
        break;
    }
  }
  return out.str();
}

VerdictReport verify_axioms(std::span<const double> prices) {
  if (prices.empty()) throw Error(ErrorCode::kEmptyInput, "no prices to verify");
  VerdictReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const double p = prices[i];
    sum += p;
    if (p < 0.0) {
      report.add({ViolationCode::kNegative, static_cast<int>(i), p, 0.0});
    } else if (p > 1.0) {
      report.add({ViolationCode::kAboveOne, static_cast<int>(i), p, 1.0});
    }
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    report.add({ViolationCode::kSum, -1, sum, 1.0});
  }
  return report;
}

VerdictReport verify_interval_coherence(const ProbabilityIntervalSet& intervals,
                                        bool enforce_upper) {
  VerdictReport report;
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    lower_sum += intervals.lower()[i];
    upper_sum += intervals.upper()[i];
  }
  if (lower_sum > 1.0 + kProbTolerance) {
    report.add({ViolationCode::kLowerSum, -1, lower_sum, 1.0});
  }
  if (enforce_upper && upper_sum < 1.0 - kProbTolerance) {
    report.add({ViolationCode::kUpperSum, -1, upper_sum, 1.0});
  }
  return report;
}

VerdictReport verify_possibility(const PossibilityAssignment& assignment) {
  VerdictReport report;
  if (!(assignment.max_score() > 0.0)) {
    report.add({ViolationCode::kAllZero, -1, 0.0, 0.0});
  }
  return report;
}

PossibilityAssignment normalize_possibility(const PossibilityAssignment& a) {
  const double top = a.max_score();
  if (!(top > 0.0)) {
    throw Error(ErrorCode::kAllZero, "cannot normalize an all-zero possibility");
  }
  std::vector<double> scaled(a.raw_scores().begin(), a.raw_scores().end());
  for (double& v : scaled) v /= top;
  std::optional<double> nota;
  if (a.none_of_above()) nota = *a.none_of_above() / top;
  return PossibilityAssignment(a.candidates(), std::move(scaled), nota);
}

}  // namespace ipelicit
