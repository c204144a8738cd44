#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "ipelicit/types.hpp"

namespace ipelicit {

// Maximum mean imprecision under total variation: the largest gap between
// upper and lower probability over all events of the answer space.

enum class MmiMode {
  kExactEventEnum,
  kUpperBound,
  kIntervalWidth,
  kPossibilityOrderStat,
  kPossibilityBinary,
};

std::string_view to_string(MmiMode mode);

struct MmiScore {
  double value = 0.0;
  MmiMode mode = MmiMode::kUpperBound;
  std::uint64_t event_count = 0;
};

// Exact enumeration is refused above this many candidates (2^16 events).
inline constexpr std::size_t kExactEnumCap = 16;

// Answer-level MMI: exact for the binary event {y, not y}.
MmiScore interval_width_mmi(double lower, double upper);
MmiScore interval_width_mmi(const ProbabilityIntervalSet& intervals,
                            std::size_t answer);

// 1 - sum of singleton lower probabilities, clamped to [0,1].
MmiScore mmi_upper_bound(std::span<const double> lowers);
MmiScore mmi_upper_bound(const ProbabilityIntervalSet& intervals);
MmiScore mmi_upper_bound(const CredalSet& credal);

// max over A of [max_m P_m(A) - min_m P_m(A)], enumerating every event.
MmiScore exact_mmi_credal(const CredalSet& credal,
                          std::size_t cap = kExactEnumCap);

// Width of a single event (bitmask over candidates) under the credal set.
// Event sums accumulate in ascending candidate order.
double credal_event_width(const CredalSet& credal, std::uint64_t event_mask);

// Second-largest normalized score over candidates plus "none of the above".
MmiScore possibility_mmi(const PossibilityAssignment& assignment);

// min(pi_yes, pi_no) / max(pi_yes, pi_no).
MmiScore possibility_binary_mmi(double pi_yes, double pi_no);

// Binary possibility MMI for one candidate: the complement "not y" takes the
// maximum score over every other outcome, including "none of the above".
MmiScore possibility_answer_mmi(const PossibilityAssignment& assignment,
                                std::size_t answer);

}  // namespace ipelicit
