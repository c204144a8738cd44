#include <gtest/gtest.h>

#include "ipelicit/error.hpp"
#include "ipelicit/prompts.hpp"

using namespace ipelicit;

namespace {

const std::vector<PromptKind> kAllKinds{PromptKind::kDefinetti,   PromptKind::kProbint,
                                        PromptKind::kCredal,      PromptKind::kPossibility,
                                        PromptKind::kCandidates, PromptKind::kVanilla};

}  // namespace

TEST(RenderPrompt, DefinettiListsCandidates) {
  const auto text = render_prompt(PromptKind::kDefinetti, "Who won?",
                                  CandidateSet::make({"England", "Wales"}));
  EXPECT_TRUE(text.starts_with(prompt_template(PromptKind::kDefinetti)));
  EXPECT_NE(text.find("Assign a buy price"), std::string::npos);
  EXPECT_NE(text.find("1. England\n2. Wales"), std::string::npos);
  EXPECT_NE(text.find("Who won?"), std::string::npos);
  EXPECT_TRUE(text.ends_with(output_format_instruction(PromptKind::kDefinetti)));
}

TEST(RenderPrompt, CandidatesNeedsNoList) {
  const auto text = render_prompt(PromptKind::kCandidates, "Who won?", std::nullopt);
  EXPECT_NE(text.find("numbered list"), std::string::npos);
  EXPECT_EQ(text.find("Answers:"), std::string::npos);
  EXPECT_NE(text.find("Question: Who won?"), std::string::npos);
}

TEST(RenderPrompt, MissingCandidates) {
  try {
    render_prompt(PromptKind::kProbint, "q", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCandidates);
  }
  EXPECT_THROW(render_prompt(PromptKind::kDefinetti, "", CandidateSet::make({"a"})), Error);
  try {
    prompt_kind_from_string("bogus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownKind);
  }
}

TEST(RenderPrompt, VanillaShowsProposedAnswer) {
  const auto text = render_prompt(PromptKind::kVanilla, "q?", CandidateSet::make({"Paris"}));
  EXPECT_NE(text.find("Paris"), std::string::npos);
  EXPECT_NE(text.find("CONF|conf="), std::string::npos);
}

TEST(PromptInverse, RoundTripsEveryKind) {
  const auto cands = CandidateSet::make({"alpha", "beta gamma", "delta"});
  for (auto kind : kAllKinds) {
    EXPECT_EQ(prompt_kind_from_string(to_string(kind)), kind);
    const auto text = render_prompt(kind, "Line one\nLine two?", cands);
    EXPECT_EQ(detect_prompt_kind(text), kind) << to_string(kind);
    EXPECT_EQ(extract_question(text), "Line one\nLine two?") << to_string(kind);
    EXPECT_EQ(detect_attempt(text), 1);
    if (kind != PromptKind::kCandidates && kind != PromptKind::kVanilla) {
      EXPECT_EQ(extract_prompt_candidates(text), cands.answers());
    }
    const auto retry = text + render_retry_feedback(1, "SUM") + render_retry_feedback(2, "SUM");
    EXPECT_EQ(detect_attempt(retry), 3);
    EXPECT_EQ(detect_prompt_kind(retry), kind);
  }
}

TEST(PromptCatalog, TemplatesAreDistinct) {
  for (std::size_t i = 0; i < kAllKinds.size(); ++i) {
    for (std::size_t j = i + 1; j < kAllKinds.size(); ++j) {
      EXPECT_NE(prompt_template(kAllKinds[i]), prompt_template(kAllKinds[j]));
    }
  }
}
