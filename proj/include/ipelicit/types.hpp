#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ipelicit {

// Sum checks on verbalized probabilities. Model replies are short decimal
// strings, so rounding noise stays well below this.
inline constexpr double kProbTolerance = 1e-6;

// Trim surrounding whitespace and fold ASCII case. This is the default
// answer equivalence used throughout the library.
std::string fold_answer(std::string_view answer);

// Case-sensitive sets keep answers that differ only in letter case apart
// (the synthetic casing tasks, where those are the outcomes of interest).
enum class AnswerFolding { kCaseInsensitive, kCaseSensitive };

// Comparison key of an answer under a folding policy.
std::string answer_key(std::string_view answer, AnswerFolding folding);

// Ordered, deduplicated list of answer strings. First occurrence wins when
// two answers fold to the same key; the surviving spelling is kept verbatim
// (after trimming).
class CandidateSet {
 public:
  static CandidateSet make(std::vector<std::string> answers,
                           bool open_ended = false,
                           AnswerFolding folding = AnswerFolding::kCaseInsensitive);

  const std::vector<std::string>& answers() const { return answers_; }
  const std::string& operator[](std::size_t i) const { return answers_[i]; }
  std::size_t size() const { return answers_.size(); }
  bool open_ended() const { return open_ended_; }
  AnswerFolding folding() const { return folding_; }

  std::optional<std::size_t> index_of(std::string_view answer) const;

  // Same answers in the same order; the open-ended flag is provenance only.
  // Lookup folds by the set's own policy.
  bool operator==(const CandidateSet& other) const {
    return answers_ == other.answers_;
  }

 private:
  CandidateSet() = default;

  std::vector<std::string> answers_;
  bool open_ended_ = false;
  AnswerFolding folding_ = AnswerFolding::kCaseInsensitive;
};

class PrecisePMF {
 public:
  // Validates each prob in [0,1] and the sum within kProbTolerance.
  PrecisePMF(CandidateSet candidates, std::vector<double> probs);

  const CandidateSet& candidates() const { return candidates_; }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const { return probs_.size(); }

 private:
  CandidateSet candidates_;
  std::vector<double> probs_;
};

class ProbabilityIntervalSet {
 public:
  // Validates 0 <= lower[i] <= upper[i] <= 1.
  ProbabilityIntervalSet(CandidateSet candidates, std::vector<double> lower,
                         std::vector<double> upper);

  const CandidateSet& candidates() const { return candidates_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  std::size_t size() const { return lower_.size(); }

 private:
  CandidateSet candidates_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Finite ensemble of PMFs over one candidate set; the credal set proper is
// their convex hull, whose extreme points are exactly these members.
class CredalSet {
 public:
  CredalSet(CandidateSet candidates, std::vector<PrecisePMF> members,
            std::vector<std::string> member_tags = {});

  const CandidateSet& candidates() const { return candidates_; }
  const std::vector<PrecisePMF>& members() const { return members_; }
  const std::vector<std::string>& member_tags() const { return tags_; }
  std::size_t size() const { return members_.size(); }

 private:
  CandidateSet candidates_;
  std::vector<PrecisePMF> members_;
  std::vector<std::string> tags_;
};

// Raw (possibly unnormalized) plausibility scores. An all-zero assignment is
// representable so that an elicited reply can be recorded and rejected by the
// verifier; normalization and MMI refuse it with AllZero.
class PossibilityAssignment {
 public:
  PossibilityAssignment(CandidateSet candidates, std::vector<double> raw_scores,
                        std::optional<double> none_of_above);

  const CandidateSet& candidates() const { return candidates_; }
  std::span<const double> raw_scores() const { return raw_; }
  std::optional<double> none_of_above() const { return nota_; }

  // Candidate scores followed by the "none of the above" slot, if present.
  std::vector<double> combined_scores() const;
  double max_score() const;

 private:
  CandidateSet candidates_;
  std::vector<double> raw_;
  std::optional<double> nota_;
};

PrecisePMF build_pmf(const CandidateSet& candidates,
                     std::span<const double> weights, bool renormalize);

ProbabilityIntervalSet interval_from_credal(const CredalSet& credal);

}  // namespace ipelicit
