#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipelicit/types.hpp"

namespace ipelicit {

enum class ViolationCode {
  kNegative,       // a price or probability below zero
  kAboveOne,       // a price or probability above one
  kSum,            // prices do not sum to one
  kLowerSum,       // lower probabilities sum above one
  kUpperSum,       // upper probabilities cannot reach one
  kAllZero,        // no outcome is plausible
  kParse,          // reply could not be parsed into a report
  kEmptyList,      // candidate generation yielded nothing
};

std::string_view to_string(ViolationCode code);
ViolationCode violation_code_from_string(std::string_view name);

struct Violation {
  ViolationCode code;
  int index;  // candidate index, or -1 for a global constraint
  double observed;
  double bound;

  bool operator==(const Violation&) const = default;
};

struct VerdictReport {
  bool passed = true;
  std::vector<Violation> violations;

  void add(Violation v) {
    violations.push_back(v);
    passed = false;
  }
  // Human-readable summary used when re-prompting a model.
  std::string describe() const;

  bool operator==(const VerdictReport&) const = default;
};

// Non-negativity and normalization of betting prices. Additivity is implied
// for mutually exclusive, exhaustive candidates and is not checked.
VerdictReport verify_axioms(std::span<const double> prices);

// Sum of lower bounds <= 1; with enforce_upper, also sum of upper bounds >= 1.
VerdictReport verify_interval_coherence(const ProbabilityIntervalSet& intervals,
                                        bool enforce_upper = false);

// Feasibility of normalization: at least one strictly positive score.
VerdictReport verify_possibility(const PossibilityAssignment& assignment);

// Divide every score (including "none of the above") by the maximum.
PossibilityAssignment normalize_possibility(const PossibilityAssignment& a);

}  // namespace ipelicit
