#include <gtest/gtest.h>

#include <random>

#include "ipelicit/coherence.hpp"
#include "ipelicit/error.hpp"

using namespace ipelicit;

namespace {

bool has(const VerdictReport& v, ViolationCode code, int index) {
  for (const auto& x : v.violations) {
    if (x.code == code && x.index == index) return true;
  }
  return false;
}

CandidateSet ab() { return CandidateSet::make({"A", "B"}); }

}  // namespace

TEST(VerifyAxioms, Examples) {
  EXPECT_TRUE(verify_axioms(std::vector{0.5, 0.5}).passed);

  const auto over = verify_axioms(std::vector{0.6, 0.6});
  EXPECT_FALSE(over.passed);
  ASSERT_TRUE(has(over, ViolationCode::kSum, -1));
  EXPECT_NEAR(over.violations.back().observed, 1.2, 1e-12);
  EXPECT_EQ(over.violations.back().bound, 1.0);

  const auto sign = verify_axioms(std::vector{1.1, -0.1});
  EXPECT_FALSE(sign.passed);
  EXPECT_TRUE(has(sign, ViolationCode::kNegative, 1));
  EXPECT_TRUE(has(sign, ViolationCode::kAboveOne, 0));
}

TEST(VerifyAxioms, EmptyInputThrows) {
  EXPECT_THROW(verify_axioms(std::vector<double>{}), Error);
}

TEST(VerifyAxioms, RescalingBreaksNormalization) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng() % 6);
    double sum = 0.0;
    for (auto& x : p) sum += (x = u(rng));
    for (auto& x : p) x /= sum;
    ASSERT_TRUE(verify_axioms(p).passed);
    const double c = trial % 2 ? 1.01 + u(rng) : 0.99 - 0.5 * u(rng);
    for (auto& x : p) x *= c;
    const auto v = verify_axioms(p);
    EXPECT_TRUE(has(v, ViolationCode::kSum, -1));
    EXPECT_EQ(verify_axioms(p), v);
  }
}

TEST(VerifyIntervalCoherence, Examples) {
  const auto c = ab();
  EXPECT_TRUE(verify_interval_coherence({c, {0.3, 0.3}, {0.6, 0.7}}, true).passed);

  const auto lower = verify_interval_coherence({c, {0.7, 0.5}, {0.8, 0.6}});
  EXPECT_FALSE(lower.passed);
  ASSERT_TRUE(has(lower, ViolationCode::kLowerSum, -1));
  EXPECT_NEAR(lower.violations[0].observed, 1.2, 1e-12);

  const ProbabilityIntervalSet narrow(c, {0.2, 0.2}, {0.3, 0.3});
  EXPECT_TRUE(verify_interval_coherence(narrow).passed);
  const auto upper = verify_interval_coherence(narrow, true);
  ASSERT_TRUE(has(upper, ViolationCode::kUpperSum, -1));
  EXPECT_NEAR(upper.violations[0].observed, 0.6, 1e-12);
}

TEST(NormalizePossibility, Examples) {
  const auto c = ab();
  const auto n = normalize_possibility({c, {0.8, 0.4}, 0.2});
  EXPECT_EQ(n.raw_scores()[0], 1.0);
  EXPECT_DOUBLE_EQ(n.raw_scores()[1], 0.5);
  EXPECT_DOUBLE_EQ(*n.none_of_above(), 0.25);

  const auto same = normalize_possibility({c, {1.0, 0.3}, 0.0});
  EXPECT_EQ(same.raw_scores()[0], 1.0);
  EXPECT_EQ(same.raw_scores()[1], 0.3);
  EXPECT_EQ(*same.none_of_above(), 0.0);

  try {
    normalize_possibility({c, {0.0, 0.0}, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllZero);
  }
  EXPECT_FALSE(verify_possibility({c, {0.0, 0.0}, 0.0}).passed);
}

TEST(NormalizePossibility, IdempotentAndScaleInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<std::string> names;
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("y" + std::to_string(i));
    for (auto& x : raw) x = u(rng);
    raw[rng() % n] = std::max(raw[0], 0.05);
    const double nota = u(rng);
    const auto c = CandidateSet::make(names);
    const double scale = 0.05 + 0.9 * u(rng);
    std::vector<double> scaled = raw;
    for (auto& x : scaled) x *= scale;

    const auto a = normalize_possibility({c, raw, nota});
    const auto b = normalize_possibility({c, scaled, nota * scale});
    const auto again = normalize_possibility(a);
    EXPECT_EQ(a.max_score(), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(a.raw_scores()[i], b.raw_scores()[i], 1e-12);
      EXPECT_NEAR(a.raw_scores()[i], again.raw_scores()[i], 1e-12);
    }
    EXPECT_NEAR(*a.none_of_above(), *b.none_of_above(), 1e-12);
  }
}
