#include <gtest/gtest.h>

#include <random>

#include "ipelicit/decision.hpp"
#include "ipelicit/error.hpp"

using namespace ipelicit;

namespace {

CandidateSet names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("y" + std::to_string(i));
  return CandidateSet::make(v);
}

}  // namespace

TEST(PreciseArgmax, Examples) {
  const auto c2 = names(2);
  EXPECT_EQ(precise_argmax({c2, {0.2, 0.8}}).chosen_index, 1u);
  const auto tie = precise_argmax({c2, {0.5, 0.5}});
  EXPECT_EQ(tie.chosen_index, 0u);
  EXPECT_TRUE(tie.tie_broken);
  const auto three = precise_argmax({names(3), {0.3, 0.3, 0.4}});
  EXPECT_EQ(three.chosen_index, 2u);
  EXPECT_EQ(three.chosen_answer, "y2");
  EXPECT_FALSE(three.tie_broken);
}

TEST(IntervalRules, Examples) {
  const auto c = CandidateSet::make({"A", "B"});
  const ProbabilityIntervalSet iv(c, {0.3, 0.4}, {0.6, 0.5});
  EXPECT_EQ(maximin(iv).chosen_answer, "B");
  EXPECT_EQ(maximax(iv).chosen_answer, "A");
  EXPECT_EQ(maximin(iv).rule, DecisionRule::kMaximin);

  const auto tied = maximin({c, {0.2, 0.2}, {0.9, 0.3}});
  EXPECT_EQ(tied.chosen_answer, "A");
  EXPECT_TRUE(tied.tie_broken);

  const auto vacuous = maximax({names(3), {0, 0, 0}, {1, 1, 1}});
  EXPECT_EQ(vacuous.chosen_index, 0u);
  EXPECT_TRUE(vacuous.tie_broken);
}

TEST(IntervalRules, CollapseOnDegenerateIntervals) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = names(1 + rng() % 8);
    std::vector<double> w(c.size());
    for (auto& x : w) x = std::floor(u(rng) * 5.0) + 0.5;
    const auto p = build_pmf(c, w, true);
    const std::vector<double> probs(p.probs().begin(), p.probs().end());
    const ProbabilityIntervalSet iv(c, probs, probs);
    const auto ref = precise_argmax(p);
    EXPECT_EQ(maximin(iv).chosen_index, ref.chosen_index);
    EXPECT_EQ(maximax(iv).chosen_index, ref.chosen_index);
    EXPECT_EQ(maximin(iv).tie_broken, ref.tie_broken);
  }
}

TEST(BayesExpectedUtility, Examples) {
  const auto c = names(2);
  const PrecisePMF p(c, {0.3, 0.7});
  EXPECT_EQ(bayes_expected_utility({{1.0, p}}).chosen_index, precise_argmax(p).chosen_index);

  const auto sym = bayes_expected_utility({{0.5, {c, {1.0, 0.0}}}, {0.5, {c, {0.0, 1.0}}}});
  EXPECT_EQ(sym.chosen_index, 0u);
  EXPECT_TRUE(sym.tie_broken);

  // Mixture 0.9 * (0.4, 0.6) + 0.1 * (1, 0) = (0.46, 0.54).
  const auto mix = bayes_expected_utility({{0.9, {c, {0.4, 0.6}}}, {0.1, {c, {1.0, 0.0}}}});
  EXPECT_EQ(mix.chosen_index, 1u);
  EXPECT_EQ(mix.rule, DecisionRule::kBayesEu);

  try {
    bayes_expected_utility({{0.5, p}, {0.2, p}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWeightSumViolation);
  }
  try {
    bayes_expected_utility({{0.5, p}, {0.5, {names(3), {0.2, 0.3, 0.5}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCandidateSetMismatch);
  }
}

TEST(UtilitarianAggregate, Examples) {
  const auto c = names(2);
  const auto mean = utilitarian_aggregate(CredalSet(c, {{c, {0.2, 0.8}}, {c, {0.6, 0.4}}}));
  EXPECT_NEAR(mean[0], 0.4, 1e-15);
  EXPECT_NEAR(mean[1], 0.6, 1e-15);

  const auto single = utilitarian_aggregate(CredalSet(c, {{c, {0.3, 0.7}}}));
  EXPECT_EQ(single[0], 0.3);

  // Mean (0.6, 0.4) picks index 0 although two of three members prefer 1.
  const auto split = utilitarian_aggregate(
      CredalSet(c, {{c, {1.0, 0.0}}, {c, {0.4, 0.6}}, {c, {0.4, 0.6}}}));
  EXPECT_EQ(precise_argmax(split).chosen_index, 0u);
  int votes_for_one = 0;
  for (const auto& row : {std::vector{1.0, 0.0}, {0.4, 0.6}, {0.4, 0.6}}) votes_for_one += row[1] > row[0];
  EXPECT_EQ(votes_for_one, 2);

  const auto rows = utilitarian_aggregate_scores({{0.9, 0.8}, {0.1, 0.6}});
  EXPECT_NEAR(rows[0], 0.5, 1e-15);
  EXPECT_NEAR(rows[1], 0.7, 1e-15);
}

TEST(AlignmentRate, Examples) {
  const auto c = CandidateSet::make({"A", "B", "C"});
  std::vector<DecisionOutcome> rule;
  for (std::size_t i : {0, 1, 2, 0}) rule.push_back(argmax_decision(c, std::vector<double>{
      i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0}, DecisionRule::kMaximin));
  EXPECT_EQ(alignment_rate(std::vector<std::string>{"a", "B", "c ", "A"}, rule), 1.0);
  EXPECT_EQ(alignment_rate(std::vector<std::string>{"X", "X", "X", "X"}, rule), 0.0);
  EXPECT_EQ(alignment_rate(std::vector<std::string>{"A", "B", "C", "B"}, rule), 0.75);
  const std::vector<std::optional<std::string>> missing{"A", std::nullopt, "C", "A"};
  EXPECT_EQ(alignment_rate(missing, rule), 0.75);
  EXPECT_THROW(alignment_rate(std::vector<std::string>{"A"}, rule), Error);
}
