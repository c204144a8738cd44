#include "ipelicit/decision.hpp"

#include <algorithm>
#include <cmath>

#include "ipelicit/error.hpp"

namespace ipelicit {

std::string_view to_string(DecisionRule rule) {
  switch (rule) {
    case DecisionRule::kPreciseArgmax: return "precise_argmax";
    case DecisionRule::kMaximin: return "maximin";
    case DecisionRule::kMaximax: return "maximax";
    case DecisionRule::kBayesEu: return "bayes_eu";
    case DecisionRule::kUtilitarianArgmax: return "utilitarian_argmax";
  }
  return "unknown";
}

DecisionOutcome argmax_decision(const CandidateSet& candidates,
                                std::span<const double> values,
                                DecisionRule rule) {
  if (values.size() != candidates.size() || values.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "values do not align with candidates");
  }
  const double best = *std::max_element(values.begin(), values.end());
  DecisionOutcome out;
  out.rule = rule;
  std::size_t attained = 0;
  bool chosen = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= best - kTieTolerance) {
      ++attained;
      if (!chosen) {
        out.chosen_index = i;
        chosen = true;
      }
    }
  }
  out.tie_broken = attained >= 2;
  out.chosen_answer = candidates[out.chosen_index];
  return out;
}

DecisionOutcome precise_argmax(const PrecisePMF& p) {
  return argmax_decision(p.candidates(), p.probs(), DecisionRule::kPreciseArgmax);
}

DecisionOutcome maximin(const ProbabilityIntervalSet& intervals) {
  return argmax_decision(intervals.candidates(), intervals.lower(),
                         DecisionRule::kMaximin);
}

DecisionOutcome maximax(const ProbabilityIntervalSet& intervals) {
  return argmax_decision(intervals.candidates(), intervals.upper(),
                         DecisionRule::kMaximax);
}

DecisionOutcome bayes_expected_utility(
    const std::vector<std::pair<double, PrecisePMF>>& conditionals) {
  if (conditionals.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no clarification-conditioned PMFs");
  }
  const CandidateSet& candidates = conditionals.front().second.candidates();
  double weight_sum = 0.0;
  std::vector<double> expected(candidates.size(), 0.0);
  for (const auto& [w, pmf] : conditionals) {
    if (!(w >= 0.0)) {
      throw Error(ErrorCode::kWeightSumViolation, "negative context weight");
    }
    if (!(pmf.candidates() == candidates)) {
      throw Error(ErrorCode::kCandidateSetMismatch,
                  "conditionals must share one candidate set");
    }
    weight_sum += w;
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] += w * pmf[i];
  }
  if (std::abs(weight_sum - 1.0) > kProbTolerance) {
    throw Error(ErrorCode::kWeightSumViolation,
                "context weights sum to " + std::to_string(weight_sum));
  }
  return argmax_decision(candidates, expected, DecisionRule::kBayesEu);
}

PrecisePMF utilitarian_aggregate(const CredalSet& credal) {
  const std::size_t n = credal.candidates().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& m : credal.members()) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += m[i];
  }
  const double count = static_cast<double>(credal.size());
  for (double& v : mean) v /= count;
  return build_pmf(credal.candidates(), mean, /*renormalize=*/false);
}

std::vector<double> utilitarian_aggregate_scores(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyCredal, "no score rows");
  const std::size_t n = rows.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw Error(ErrorCode::kLengthMismatch, "score rows differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) mean[i] += row[i];
  }
  for (double& v : mean) v /= static_cast<double>(rows.size());
  return mean;
}

double alignment_rate(std::span<const std::optional<std::string>> llm_choices,
                      std::span<const DecisionOutcome> rule_choices) {
  if (llm_choices.size() != rule_choices.size() || llm_choices.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                "alignment needs equal, non-empty choice lists");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < llm_choices.size(); ++i) {
    if (llm_choices[i] &&
        fold_answer(*llm_choices[i]) == fold_answer(rule_choices[i].chosen_answer)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(llm_choices.size());
}

double alignment_rate(std::span<const std::string> llm_choices,
                      std::span<const DecisionOutcome> rule_choices) {
  std::vector<std::optional<std::string>> wrapped(llm_choices.begin(),
                                                  llm_choices.end());
  return alignment_rate(std::span<const std::optional<std::string>>(wrapped),
                        rule_choices);
}

}  // namespace ipelicit
