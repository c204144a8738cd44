#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipelicit/campaign.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/mock.hpp"
#include "ipelicit/record_eval.hpp"

using namespace ipelicit;
namespace fs = std::filesystem;

namespace {

const fs::path kData = IPELICIT_TEST_DATA;

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ipelicit_campaign_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CampaignConfig config() const {
    auto c = CampaignConfig::load(kData / "campaign.json");
    c.output_dir = dir_;
    return c;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

// Counts every request sent through it.
class CountingClient : public ChatClient {
 public:
  explicit CountingClient(std::unique_ptr<ChatClient> inner, int* counter)
      : inner_(std::move(inner)), counter_(counter) {}
  ChatReply complete(const ChatRequest& r) override {
    ++*counter_;
    return inner_->complete(r);
  }

 private:
  std::unique_ptr<ChatClient> inner_;
  int* counter_;
};

std::vector<std::string> record_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = ojson::parse(line);
    out.push_back(strip_timing(j).dump());
  }
  return out;
}

}  // namespace

TEST_F(CampaignTest, ConfigRoundTripAndValidation) {
  const auto c = config();
  EXPECT_EQ(c.methods.size(), 5u);
  EXPECT_TRUE(c.endpoints[0].base_url.starts_with("mock://"));
  EXPECT_TRUE(fs::exists(c.endpoints[0].base_url.substr(7)));
  const auto again = CampaignConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json().dump(), c.to_json().dump());

  auto bad = c.to_json();
  bad["methods"] = ojson::array();
  EXPECT_THROW(CampaignConfig::from_json(bad), Error);
  bad = c.to_json();
  bad["seeds"] = ojson::array();
  EXPECT_THROW(CampaignConfig::from_json(bad), Error);
  bad = c.to_json();
  bad["methods"] = {"candidates"};
  EXPECT_THROW(CampaignConfig::from_json(bad), Error);
}

TEST_F(CampaignTest, RunsEveryQuestionMethodSeed) {
  const auto summary = run_campaign(config());
  EXPECT_EQ(summary.planned, 15u);
  EXPECT_EQ(summary.written, 15u);
  EXPECT_EQ(summary.failed, 0u);

  const auto records = read_records(summary.records_path);
  ASSERT_EQ(records.size(), 16u);
  EXPECT_EQ(records[0]["schema"], "ipelicit.run_record");
  for (std::size_t i = 1; i < records.size(); ++i) EXPECT_EQ(records[i]["status"], "ok") << records[i].dump();

  const auto latest = latest_records(records);
  const auto& q1_def = latest.at({"q1", "definetti", 0});
  EXPECT_EQ(q1_def["reports"][0]["attempts"].size(), 2u);
  EXPECT_EQ(q1_def["scores"]["level"], "answer");
  EXPECT_NEAR(q1_def["scores"]["bernoulli_entropy"].get<double>(),
              -0.45 * std::log(0.45) - 0.55 * std::log(0.55), 1e-12);
  EXPECT_TRUE(q1_def["labels"]["ambiguous"].get<bool>());
  EXPECT_FALSE(q1_def["reference_values"]["kl_eu"].is_null());

  const auto& q1_cred = latest.at({"q1", "credal", 0});
  EXPECT_EQ(q1_cred["ensemble"]["member_tags"],
            (ojson{"mock#seed=0", "mock#seed=1"}));
  EXPECT_NEAR(q1_cred["scores"]["exact_mmi"].get<double>(), 0.2, 1e-12);

  const auto& q3_prob = latest.at({"q3", "probint", 0});
  EXPECT_NEAR(q3_prob["scores"]["interval_width"].get<double>(), 0.3, 1e-12);
  EXPECT_FALSE(q3_prob["labels"]["correct"].get<bool>());

  const auto& q2_van = latest.at({"q2", "vanilla", 0});
  EXPECT_NEAR(q2_van["scores"]["vanilla_uncertainty"].get<double>(), 0.2, 1e-12);
  EXPECT_TRUE(q2_van["candidates"].is_null());
}

TEST_F(CampaignTest, ByteIdenticalAcrossRunsAndRescoresExactly) {
  auto a = config();
  a.output_dir = dir_ / "a";
  auto b = config();
  b.output_dir = dir_ / "b";
  b.concurrency = 4;
  run_campaign(a);
  run_campaign(b);
  const auto la = record_lines(slurp(a.records_path()));
  const auto lb = record_lines(slurp(b.records_path()));
  EXPECT_EQ(la, lb);

  for (const auto& rec : read_records(a.records_path())) {
    if (!rec.contains("key")) continue;
    const auto re = rescore_record(rec);
    EXPECT_EQ(re["scores"].dump(), rec["scores"].dump());
    EXPECT_EQ(re["reference_values"].dump(), rec["reference_values"].dump());
    EXPECT_EQ(re["decisions"].dump(), rec["decisions"].dump());
  }
}

TEST_F(CampaignTest, ResumeIssuesOnlyMissingElicitations) {
  const auto c = config();
  run_campaign(c);
  const auto full = slurp(c.records_path());

  // Drop the q2/possibility record and leave a torn tail behind.
  std::istringstream in(full);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.find(R"("question_id":"q2","method":"possibility")") != std::string::npos) continue;
    kept += line + "\n";
  }
  kept += R"({"key":{"question_id":"q)";
  std::ofstream(c.records_path(), std::ios::binary | std::ios::trunc) << kept;

  int requests = 0;
  RunHooks hooks;
  hooks.client_factory = [&](const ModelEndpoint& e) {
    return std::make_unique<CountingClient>(make_client(e), &requests);
  };
  const auto summary = run_campaign(c, hooks);
  EXPECT_EQ(summary.skipped, 14u);
  EXPECT_EQ(summary.written, 1u);
  EXPECT_EQ(requests, 2);  // candidate generation + possibility

  auto resumed = record_lines(slurp(c.records_path()));
  auto original = record_lines(full);
  std::sort(resumed.begin(), resumed.end());
  std::sort(original.begin(), original.end());
  EXPECT_EQ(resumed, original);
}

TEST_F(CampaignTest, FailedRecordsArePartialAndRetriedOnResume) {
  auto c = config();
  c.retry_budget = 1;
  const auto summary = run_campaign(c);
  EXPECT_TRUE(summary.partial());
  const auto latest = latest_records(read_records(c.records_path()));
  const auto& failed = latest.at({"q1", "definetti", 0});
  EXPECT_EQ(failed["status"], "failed");
  EXPECT_NE(failed["error"].get<std::string>().find("RetriesExhausted"), std::string::npos);

  c.retry_budget = 5;
  const auto again = run_campaign(c);
  EXPECT_EQ(again.written, summary.failed);
  EXPECT_FALSE(again.partial());
  EXPECT_EQ(latest_records(read_records(c.records_path())).at({"q1", "definetti", 0})["status"], "ok");
}

TEST_F(CampaignTest, UnreachableEndpointStopsAfterCommitting) {
  auto c = config();
  c.endpoints[0].base_url = "http://127.0.0.1:1/v1";
  RunHooks hooks;
  hooks.client_factory = [](const ModelEndpoint& e) {
    return std::make_unique<HttpChatClient>(e, BackoffPolicy{0, std::chrono::milliseconds(0), 1.0});
  };
  try {
    run_campaign(c, hooks);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEndpointUnreachable);
  }
  EXPECT_EQ(read_records(c.records_path()).size(), 1u);
}

TEST_F(CampaignTest, UnreadableDataset) {
  auto c = config();
  c.dataset->path = kData / "nope.jsonl";
  try {
    run_campaign(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetParse);
  }
}

TEST_F(CampaignTest, MetricTablesAndCostFromRecords) {
  const auto c = config();
  run_campaign(c);
  const auto records = read_records(c.records_path());
  const auto rows = auroc_table(records, "ambiguous", "first_order", "qa_small");
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
  }
  const auto ledger = ledger_from_records(records, c.endpoints);
  const auto t = ledger.total();
  EXPECT_GT(t.input_tokens, 0u);
  EXPECT_NEAR(t.currency, t.input_tokens * 1e-6 + t.output_tokens * 2e-6, 1e-12);
  EXPECT_FALSE(ledger.methods("mock").empty());
}

TEST(ComputeScores, ReferenceValuesUseCandidateMapping) {
  const auto cands = CandidateSet::make({"A", "B"});
  ElicitationResult r;
  r.kind = PromptKind::kDefinetti;
  r.success = true;
  r.payload = PrecisePMF(cands, {0.25, 0.75});
  const auto out = compute_scores(PromptKind::kDefinetti, cands, {r}, std::nullopt,
                                  ReferenceDistribution{{"a", "b"}, {0.5, 0.5}});
  EXPECT_EQ(out["scores"]["level"], "set");
  const double h = std::log(2.0);
  const double ce = -0.5 * std::log(0.25) - 0.5 * std::log(0.75);
  EXPECT_NEAR(out["reference_values"]["entropy_au"].get<double>(), h, 1e-12);
  EXPECT_NEAR(out["reference_values"]["cross_entropy"].get<double>(), ce, 1e-12);
  EXPECT_NEAR(out["reference_values"]["kl_eu"].get<double>(), ce - h, 1e-12);
}
