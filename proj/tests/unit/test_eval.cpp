#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ipelicit/error.hpp"
#include "ipelicit/eval.hpp"

using namespace ipelicit;

namespace {

double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double brute_concordance(const std::vector<double>& s, const std::vector<double>& r) {
  double good = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (r[i] == r[j]) continue;
      pairs += 1.0;
      if (s[i] == s[j]) {
        good += 0.5;
      } else if ((s[i] < s[j]) == (r[i] < r[j])) {
        good += 1.0;
      }
    }
  }
  return good / pairs;
}

ModelEndpoint priced(std::string name, double in, double out) {
  ModelEndpoint e;
  e.name = std::move(name);
  e.base_url = "http://x";
  e.price_per_input_token = in;
  e.price_per_output_token = out;
  return e;
}

ElicitationResult result(const std::string& endpoint, PromptKind kind, Usage usage) {
  ElicitationResult r;
  r.endpoint = endpoint;
  r.kind = kind;
  AttemptRecord a;
  a.usage = usage;
  r.attempt_log.push_back(a);
  return r;
}

}  // namespace

TEST(Auroc, Examples) {
  EXPECT_EQ(auroc(std::vector{0.9, 0.1}, std::vector{1, 0}), 1.0);
  EXPECT_EQ(auroc(std::vector{0.3, 0.3, 0.3}, std::vector{1, 0, 1}), 0.5);
  try {
    auroc(std::vector{0.1, 0.2}, std::vector{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
  EXPECT_THROW(auroc(std::vector{0.1, 0.2}, std::vector{1, 2}), Error);
  const std::vector<ScoredExample> ex{{0.2, 0, {}}, {0.8, 1, {}}, {0.5, 0, {}}};
  EXPECT_EQ(auroc(ex), 1.0);
}

TEST(Auroc, MatchesBruteForceExactly) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 99;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 10) / 10.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    const double a = auroc(s, y);
    EXPECT_EQ(a, brute_auroc(s, y));

    std::vector<int> flipped(y);
    for (auto& v : flipped) v = 1 - v;
    EXPECT_NEAR(auroc(s, flipped), 1.0 - a, 1e-12);
    std::vector<double> cubed(s);
    for (auto& v : cubed) v = v * v * v + 2.0;
    EXPECT_EQ(auroc(cubed, y), a);
  }
}

TEST(Concordance, Examples) {
  EXPECT_EQ(concordance_index(std::vector{1.0, 2.0, 3.0}, std::vector{10.0, 20.0, 30.0}), 1.0);
  EXPECT_EQ(concordance_index(std::vector{3.0, 2.0, 1.0}, std::vector{10.0, 20.0, 30.0}), 0.0);
  try {
    concordance_index(std::vector{1.0, 2.0}, std::vector{5.0, 5.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllRefsTied);
  }
  EXPECT_THROW(concordance_index(std::vector{1.0}, std::vector{5.0}), Error);
}

TEST(Concordance, MatchesBruteForceExactly) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng() % 99;
    std::vector<double> s(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7);
      r[i] = static_cast<double>(rng() % 5);
    }
    r[0] = 0.0;
    r[1] = 1.0;
    const double c = concordance_index(s, r);
    EXPECT_EQ(c, brute_concordance(s, r));
    std::vector<double> s2(s), r2(r);
    for (auto& v : s2) v = std::exp(v);
    for (auto& v : r2) v = 3.0 * v + 1.0;
    EXPECT_EQ(concordance_index(s2, r2), c);
  }
}

TEST(CostLedger, HandComputedTotals) {
  const auto e = priced("gpt", 1e-6, 2e-6);
  const std::vector<ElicitationResult> results{result("gpt", PromptKind::kDefinetti, {1000, 500})};
  const auto ledger = cost_report(results, std::vector{e});
  EXPECT_NEAR(ledger.total().currency, 0.002, 1e-12);
  EXPECT_EQ(ledger.total().input_tokens, 1000u);

  EXPECT_TRUE(cost_report({}, std::vector{e}).empty());
  EXPECT_EQ(cost_report({}, std::vector{e}).total().currency, 0.0);

  try {
    cost_report(std::vector{result("nope", PromptKind::kDefinetti, {1, 1})}, std::vector{e});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kUnknownEndpoint);
  }
}

TEST(CostLedger, MethodRowsSumToEndpointAndMergeIsAdditive) {
  const auto a = priced("a", 3e-6, 15e-6);
  const auto b = priced("b", 0.5e-6, 1.5e-6);
  const std::vector<ModelEndpoint> eps{a, b};
  const std::vector<ElicitationResult> first{result("a", PromptKind::kDefinetti, {1200, 80}),
                                             result("a", PromptKind::kProbint, {900, 120}),
                                             result("b", PromptKind::kCredal, {400, 40})};
  const std::vector<ElicitationResult> second{result("a", PromptKind::kProbint, {100, 20}),
                                              result("b", PromptKind::kCredal, {600, 60})};
  const auto l1 = cost_report(first, eps);
  const auto l2 = cost_report(second, eps);

  double rows = 0.0;
  for (const auto& m : l1.methods("a")) rows += l1.method_total("a", m).currency;
  EXPECT_NEAR(rows, l1.endpoint_total("a").currency, 1e-12);
  EXPECT_NEAR(l1.endpoint_total("a").currency, 1200 * 3e-6 + 80 * 15e-6 + 900 * 3e-6 + 120 * 15e-6,
              1e-12);

  auto merged = l1;
  merged.merge(l2);
  EXPECT_NEAR(merged.total().currency, l1.total().currency + l2.total().currency, 1e-12);
  EXPECT_EQ(merged.endpoint_total("b").input_tokens, 1000u);
  EXPECT_NEAR(merged.method_total("a", "probint").currency, 1000 * 3e-6 + 140 * 15e-6, 1e-12);

  CostLedger conflicting;
  conflicting.add(priced("a", 1.0, 1.0), "definetti", {1, 1});
  EXPECT_THROW(merged.merge(conflicting), Error);
}

TEST(MetricCsv, FixedColumns) {
  std::ostringstream out;
  const std::vector<MetricRow> rows{{"definetti", "maqa", "auroc_ambiguous_first_order", 0.75, 0.01, 40}};
  write_metric_csv(out, rows);
  EXPECT_EQ(out.str(),
            "method,dataset,metric,value,stderr,n\n"
            "definetti,maqa,auroc_ambiguous_first_order,0.75,0.01,40\n");
}
