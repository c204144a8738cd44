#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipelicit/types.hpp"

namespace ipelicit {

enum class DecisionRule {
  kPreciseArgmax,
  kMaximin,
  kMaximax,
  kBayesEu,
  kUtilitarianArgmax,
};

std::string_view to_string(DecisionRule rule);

struct DecisionOutcome {
  std::size_t chosen_index = 0;
  std::string chosen_answer;
  DecisionRule rule = DecisionRule::kPreciseArgmax;
  bool tie_broken = false;  // >= 2 candidates within kTieTolerance of the optimum
};

inline constexpr double kTieTolerance = 1e-9;

// Lowest index among the entries within kTieTolerance of the maximum.
DecisionOutcome argmax_decision(const CandidateSet& candidates,
                                std::span<const double> values,
                                DecisionRule rule);

DecisionOutcome precise_argmax(const PrecisePMF& p);
DecisionOutcome maximin(const ProbabilityIntervalSet& intervals);
DecisionOutcome maximax(const ProbabilityIntervalSet& intervals);

// argmax_y sum_i w_i p_i(y): expected correctness utility over clarification
// contexts with weights w_i.
DecisionOutcome bayes_expected_utility(
    const std::vector<std::pair<double, PrecisePMF>>& conditionals);

// Componentwise mean of the members.
PrecisePMF utilitarian_aggregate(const CredalSet& credal);

// Mean of per-answer correctness-score rows that need not sum to one. Used
// only for ranking, so the result is not renormalized.
std::vector<double> utilitarian_aggregate_scores(
    const std::vector<std::vector<double>>& rows);

// Fraction of positions where the model's own answer folds to the same key
// as the rule's choice. A missing model answer counts as misaligned.
double alignment_rate(std::span<const std::optional<std::string>> llm_choices,
                      std::span<const DecisionOutcome> rule_choices);
double alignment_rate(std::span<const std::string> llm_choices,
                      std::span<const DecisionOutcome> rule_choices);

}  // namespace ipelicit
