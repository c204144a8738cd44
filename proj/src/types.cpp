#include "ipelicit/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

void check_unit(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::kValueOutOfRange,
                std::string(what) + " outside [0,1]: " + std::to_string(v));
  }
}

}  // namespace

std::string fold_answer(std::string_view answer) {
  std::string out(trim(answer));
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string answer_key(std::string_view answer, AnswerFolding folding) {
  if (folding == AnswerFolding::kCaseSensitive) return std::string(trim(answer));
  return fold_answer(answer);
}

CandidateSet CandidateSet::make(std::vector<std::string> answers,
                                bool open_ended, AnswerFolding folding) {
  CandidateSet set;
  set.open_ended_ = open_ended;
  set.folding_ = folding;
  std::unordered_set<std::string> seen;
  for (auto& a : answers) {
    std::string trimmed(trim(a));
    if (trimmed.empty()) {
      throw Error(ErrorCode::kEmptyAnswer, "candidate answers must be non-empty");
    }
    if (seen.insert(answer_key(trimmed, folding)).second) {
      set.answers_.push_back(std::move(trimmed));
    }
  }
  if (set.answers_.empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "candidate set needs >= 1 answer");
  }
  return set;
}

std::optional<std::size_t> CandidateSet::index_of(std::string_view answer) const {
  const std::string key = answer_key(answer, folding_);
  for (std::size_t i = 0; i < answers_.size(); ++i) {
    if (answer_key(answers_[i], folding_) == key) return i;
  }
  return std::nullopt;
}

PrecisePMF::PrecisePMF(CandidateSet candidates, std::vector<double> probs)
    : candidates_(std::move(candidates)), probs_(std::move(probs)) {
  if (probs_.size() != candidates_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "probs do not align with candidates");
  }
  for (double p : probs_) check_unit(p, "probability");
  const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw Error(ErrorCode::kSumViolation,
                "probabilities sum to " + std::to_string(sum));
  }
}

ProbabilityIntervalSet::ProbabilityIntervalSet(CandidateSet candidates,
                                               std::vector<double> lower,
                                               std::vector<double> upper)
    : candidates_(std::move(candidates)),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {
  if (lower_.size() != candidates_.size() || upper_.size() != candidates_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "bounds do not align with candidates");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    check_unit(lower_[i], "lower probability");
    check_unit(upper_[i], "upper probability");
    if (lower_[i] > upper_[i]) {
      throw Error(ErrorCode::kInvertedInterval,
                  "lower > upper for candidate " + std::to_string(i));
    }
  }
}

CredalSet::CredalSet(CandidateSet candidates, std::vector<PrecisePMF> members,
                     std::vector<std::string> member_tags)
    : candidates_(std::move(candidates)),
      members_(std::move(members)),
      tags_(std::move(member_tags)) {
  if (members_.empty()) {
    throw Error(ErrorCode::kEmptyCredal, "credal set needs >= 1 member");
  }
  for (const auto& m : members_) {
    if (!(m.candidates() == candidates_)) {
      throw Error(ErrorCode::kCandidateSetMismatch,
                  "credal members must share one candidate set");
    }
  }
  if (tags_.empty()) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      tags_.push_back("member-" + std::to_string(i));
    }
  } else if (tags_.size() != members_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "one tag per credal member");
  }
}

PossibilityAssignment::PossibilityAssignment(CandidateSet candidates,
                                             std::vector<double> raw_scores,
                                             std::optional<double> none_of_above)
    : candidates_(std::move(candidates)),
      raw_(std::move(raw_scores)),
      nota_(none_of_above) {
  if (raw_.size() != candidates_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores do not align with candidates");
  }
  for (double v : raw_) check_unit(v, "possibility");
  if (nota_) check_unit(*nota_, "none-of-the-above possibility");
}

std::vector<double> PossibilityAssignment::combined_scores() const {
  std::vector<double> all(raw_);
  if (nota_) all.push_back(*nota_);
  return all;
}

double PossibilityAssignment::max_score() const {
  double best = nota_.value_or(0.0);
  for (double v : raw_) best = std::max(best, v);
  return best;
}

PrecisePMF build_pmf(const CandidateSet& candidates,
                     std::span<const double> weights, bool renormalize) {
  if (weights.size() != candidates.size()) {
    throw Error(ErrorCode::kLengthMismatch, "weights do not align with candidates");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kNegativeWeight, "weight " + std::to_string(w));
    }
    total += w;
  }
  if (total == 0.0) {
    throw Error(ErrorCode::kZeroMass, "all weights are zero");
  }
  std::vector<double> probs(weights.begin(), weights.end());
  if (renormalize) {
    for (double& p : probs) p /= total;
  } else if (std::abs(total - 1.0) > kProbTolerance) {
    throw Error(ErrorCode::kSumViolation, "weights sum to " + std::to_string(total));
  }
  return PrecisePMF(candidates, std::move(probs));
}

ProbabilityIntervalSet interval_from_credal(const CredalSet& credal) {
  const auto& members = credal.members();
  if (members.empty()) throw Error(ErrorCode::kEmptyCredal, "no members");
  const std::size_t n = credal.candidates().size();
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower[i] = upper[i] = members.front()[i];
    for (const auto& m : members) {
      lower[i] = std::min(lower[i], m[i]);
      upper[i] = std::max(upper[i], m[i]);
    }
  }
  return ProbabilityIntervalSet(credal.candidates(), std::move(lower),
                                std::move(upper));
}

}  // namespace ipelicit
