#include "ipelicit/mmi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

void require_unit(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::kValueOutOfRange,
                std::string(what) + " outside [0,1]: " + std::to_string(v));
  }
}

// Depth-first walk over include/exclude decisions. partial[d * m + k] holds
// member k's mass of the event built from candidates [0, d); adding in
// ascending order keeps every sum identical to a direct ascending loop.
class EventEnumerator {
 public:
  explicit EventEnumerator(const CredalSet& credal)
      : n_(credal.candidates().size()), m_(credal.size()) {
    probs_.reserve(n_ * m_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& member : credal.members()) probs_.push_back(member[i]);
    }
    partial_.assign((n_ + 1) * m_, 0.0);
  }

  double run() {
    best_ = 0.0;
    visit(0);
    return best_;
  }

 private:
  void visit(std::size_t depth) {
    const double* cur = &partial_[depth * m_];
    if (depth == n_) {
      double lo = cur[0];
      double hi = cur[0];
      for (std::size_t k = 1; k < m_; ++k) {
        lo = std::min(lo, cur[k]);
        hi = std::max(hi, cur[k]);
      }
      best_ = std::max(best_, hi - lo);
      return;
    }
    double* next = &partial_[(depth + 1) * m_];
    std::copy(cur, cur + m_, next);
    visit(depth + 1);
    const double* p = &probs_[depth * m_];
    for (std::size_t k = 0; k < m_; ++k) next[k] = cur[k] + p[k];
    visit(depth + 1);
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<double> probs_;
  std::vector<double> partial_;
  double best_ = 0.0;
};

}  // namespace

std::string_view to_string(MmiMode mode) {
  switch (mode) {
    case MmiMode::kExactEventEnum: return "exact_event_enum";
    case MmiMode::kUpperBound: return "upper_bound";
    case MmiMode::kIntervalWidth: return "interval_width";
    case MmiMode::kPossibilityOrderStat: return "possibility_order_stat";
    case MmiMode::kPossibilityBinary: return "possibility_binary";
  }
  return "unknown";
}

MmiScore interval_width_mmi(double lower, double upper) {
  require_unit(lower, "lower probability");
  require_unit(upper, "upper probability");
  if (lower > upper) {
    throw Error(ErrorCode::kInvertedInterval,
                "lower " + std::to_string(lower) + " > upper " + std::to_string(upper));
  }
  return {upper - lower, MmiMode::kIntervalWidth, 0};
}

MmiScore interval_width_mmi(const ProbabilityIntervalSet& intervals,
                            std::size_t answer) {
  if (answer >= intervals.size()) {
    throw Error(ErrorCode::kValueOutOfRange, "answer index out of range");
  }
  return interval_width_mmi(intervals.lower()[answer], intervals.upper()[answer]);
}

MmiScore mmi_upper_bound(std::span<const double> lowers) {
  double sum = 0.0;
  for (double l : lowers) {
    require_unit(l, "lower probability");
    sum += l;
  }
  if (sum > 1.0 + kProbTolerance) {
    throw Error(ErrorCode::kLowerSumExceedsOne,
                "lower probabilities sum to " + std::to_string(sum));
  }
  return {std::clamp(1.0 - sum, 0.0, 1.0), MmiMode::kUpperBound, 0};
}

MmiScore mmi_upper_bound(const ProbabilityIntervalSet& intervals) {
  return mmi_upper_bound(intervals.lower());
}

MmiScore mmi_upper_bound(const CredalSet& credal) {
  return mmi_upper_bound(interval_from_credal(credal).lower());
}

MmiScore exact_mmi_credal(const CredalSet& credal, std::size_t cap) {
  const std::size_t n = credal.candidates().size();
  if (n > cap || n >= 63) {
    throw Error(ErrorCode::kCandidateSetTooLarge,
                std::to_string(n) + " candidates exceeds exact cap " +
                    std::to_string(cap));
  }
  EventEnumerator walker(credal);
  return {walker.run(), MmiMode::kExactEventEnum, std::uint64_t{1} << n};
}

double credal_event_width(const CredalSet& credal, std::uint64_t event_mask) {
  const std::size_t n = credal.candidates().size();
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto& member : credal.members()) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (event_mask & (std::uint64_t{1} << i)) mass += member[i];
    }
    if (first) {
      lo = hi = mass;
      first = false;
    } else {
      lo = std::min(lo, mass);
      hi = std::max(hi, mass);
    }
  }
  return hi - lo;
}

MmiScore possibility_mmi(const PossibilityAssignment& assignment) {
  const std::vector<double> scores = assignment.combined_scores();
  double first = 0.0;
  double second = 0.0;
  for (double v : scores) {
    if (v > first) {
      second = first;
      first = v;
    } else if (v > second) {
      second = v;
    }
  }
  if (!(first > 0.0)) {
    throw Error(ErrorCode::kAllZero, "possibility scores are all zero");
  }
  if (scores.size() < 2) return {0.0, MmiMode::kPossibilityOrderStat, 0};
  return {second / first, MmiMode::kPossibilityOrderStat, 0};
}

MmiScore possibility_binary_mmi(double pi_yes, double pi_no) {
  require_unit(pi_yes, "possibility");
  require_unit(pi_no, "possibility");
  const double hi = std::max(pi_yes, pi_no);
  if (!(hi > 0.0)) {
    throw Error(ErrorCode::kAllZero, "both possibilities are zero");
  }
  return {std::min(pi_yes, pi_no) / hi, MmiMode::kPossibilityBinary, 0};
}

MmiScore possibility_answer_mmi(const PossibilityAssignment& assignment,
                                std::size_t answer) {
  const auto raw = assignment.raw_scores();
  if (answer >= raw.size()) {
    throw Error(ErrorCode::kValueOutOfRange, "answer index out of range");
  }
  double rest = assignment.none_of_above().value_or(0.0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i != answer) rest = std::max(rest, raw[i]);
  }
  return possibility_binary_mmi(raw[answer], rest);
}

}  // namespace ipelicit
