#include <gtest/gtest.h>

#include <functional>

#include "ipelicit/error.hpp"
#include "ipelicit/report.hpp"

using namespace ipelicit;

namespace {

const auto kAB = CandidateSet::make({"A", "B"});

ErrorCode parse_error(PromptKind kind, const std::string& raw) {
  try {
    parse_structured_report(kind, raw, kAB);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << raw;
  return ErrorCode::kConfigInvalid;
}

}  // namespace

TEST(ParseReport, ProbintHappyPath) {
  const auto r = parse_structured_report(
      PromptKind::kProbint, "Sure.\n```\n1|lower=0.2|upper=0.5\n2|lower=0.3|upper=0.7\n```\n", kAB);
  EXPECT_EQ(r.lower, (std::vector{0.2, 0.3}));
  EXPECT_EQ(r.upper, (std::vector{0.5, 0.7}));
  const auto payload = build_payload(r, kAB);
  const auto& iv = std::get<ProbabilityIntervalSet>(payload);
  EXPECT_EQ(iv.lower()[1], 0.3);
  EXPECT_TRUE(verify_report(r, kAB).passed);
}

TEST(ParseReport, RowsInAnyOrderAndFieldCase) {
  const auto r =
      parse_structured_report(PromptKind::kDefinetti, "```\n2|PRICE=$0.40\n1|price=0.60\n```", kAB);
  EXPECT_EQ(r.values, (std::vector{0.6, 0.4}));
}

TEST(ParseReport, LastFencedBlockWins) {
  const auto r = parse_structured_report(
      PromptKind::kCredal, "```\n1|prob=0.9\n2|prob=0.9\n```\nrevised:\n```\n1|prob=0.5\n2|prob=0.5\n```",
      kAB);
  EXPECT_EQ(r.values, (std::vector{0.5, 0.5}));
}

TEST(ParseReport, Errors) {
  EXPECT_EQ(parse_error(PromptKind::kProbint, "```\n1|lower=0.2|upper=0.5\n```"),
            ErrorCode::kCandidateCountMismatch);
  EXPECT_EQ(parse_error(PromptKind::kProbint, "```\n1|lower=0.seven|upper=0.9\n2|lower=0.1|upper=0.2\n```"),
            ErrorCode::kNumberParse);
  EXPECT_EQ(parse_error(PromptKind::kProbint, "```\n1|lower=0.6|upper=0.5\n2|lower=0.1|upper=0.2\n```"),
            ErrorCode::kValueOutOfRange);
  EXPECT_EQ(parse_error(PromptKind::kDefinetti, "prices: 0.5 and 0.5"), ErrorCode::kNoStructuredBlock);
  EXPECT_EQ(parse_error(PromptKind::kDefinetti, "```\n1|price=0.5\n1|price=0.5\n```"),
            ErrorCode::kCandidateCountMismatch);
  EXPECT_EQ(parse_error(PromptKind::kDefinetti, "```\n1|price=0.5\n3|price=0.5\n```"),
            ErrorCode::kCandidateCountMismatch);
  EXPECT_EQ(parse_error(PromptKind::kPossibility, "```\n1|pos=1\n2|pos=0.5\n```"),
            ErrorCode::kCandidateCountMismatch);
  EXPECT_EQ(parse_error(PromptKind::kPossibility, "```\n1|pos=1\n2|pos=1.5\nNOTA|pos=0\n```"),
            ErrorCode::kValueOutOfRange);
  EXPECT_EQ(parse_error(PromptKind::kVanilla, "```\nCONF|conf=nan\n```"), ErrorCode::kValueOutOfRange);
}

TEST(ParseReport, PricesAreNotRangeCheckedHere) {
  const auto r = parse_structured_report(PromptKind::kDefinetti, "```\n1|price=1.1\n2|price=-0.1\n```", kAB);
  const auto v = verify_report(r, kAB);
  EXPECT_FALSE(v.passed);
}

TEST(ParseReport, PossibilityAndVanilla) {
  const auto p = parse_structured_report(PromptKind::kPossibility,
                                         "```\n1|pos=1.0\n2|pos=0.4\nNOTA|pos=0.1\n```", kAB);
  EXPECT_EQ(p.none_of_above, 0.1);
  const auto pa = std::get<PossibilityAssignment>(build_payload(p, kAB));
  EXPECT_EQ(pa.raw_scores()[1], 0.4);

  const auto v = parse_structured_report(PromptKind::kVanilla, "```\nCONF|conf=0.8\n```", std::nullopt);
  EXPECT_EQ(std::get<double>(build_payload(v, std::nullopt)), 0.8);
}

TEST(ParseReport, CandidateList) {
  const auto r = parse_structured_report(PromptKind::kCandidates, "1. England\n2. Wales", std::nullopt);
  EXPECT_EQ(r.answers, (std::vector<std::string>{"England", "Wales"}));
  const auto& set = std::get<CandidateSet>(build_payload(r, std::nullopt));
  EXPECT_TRUE(set.open_ended());

  const auto dup = parse_structured_report(
      PromptKind::kCandidates, "Here:\n1) **Wales**\n2. england\n3. WALES\n4. \"Scotland\"", std::nullopt);
  EXPECT_EQ(dup.answers, (std::vector<std::string>{"Wales", "england", "Scotland"}));

  const auto cased = parse_structured_report(PromptKind::kCandidates, "1. ABC\n2. aBC\n3. ABC",
                                             std::nullopt, AnswerFolding::kCaseSensitive);
  EXPECT_EQ(cased.answers, (std::vector<std::string>{"ABC", "aBC"}));
  EXPECT_EQ(std::get<CandidateSet>(build_payload(cased, std::nullopt)).size(), 2u);

  try {
    parse_structured_report(PromptKind::kCandidates, "I think it is England.", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoStructuredBlock);
  }
}

TEST(ParseReport, ReplayIsByteIdentical) {
  const std::string raw = "```\n1|prob=0.123456789\n2|prob=0.876543211\n```";
  const auto a = parse_structured_report(PromptKind::kCredal, raw, kAB);
  const auto b = parse_structured_report(PromptKind::kCredal, raw, kAB);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::get<PrecisePMF>(build_payload(a, kAB))[0], 0.123456789);
}
