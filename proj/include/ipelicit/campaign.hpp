#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipelicit/client.hpp"
#include "ipelicit/dataset.hpp"
#include "ipelicit/elicit.hpp"
#include "ipelicit/json_io.hpp"

namespace ipelicit {

struct DatasetSource {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::kMaqaLike;
  std::string name;  // label in metric tables; file stem by default
};

struct CampaignConfig {
  std::string name = "campaign";
  std::optional<DatasetSource> dataset;
  std::optional<SynthSource> synth;
  std::vector<PromptKind> methods;  // candidates is not a method
  std::vector<ModelEndpoint> endpoints;
  std::string elicitor;   // endpoint for single-model methods; first by default
  std::string generator;  // endpoint generating open-ended candidate sets
  int retry_budget = 5;
  int concurrency = 1;
  std::filesystem::path output_dir = "runs";
  std::vector<std::int64_t> seeds{0};
  int credal_members = 3;  // seed-differentiated members per endpoint
  std::size_t credal_quorum = 0;
  bool enforce_upper = false;
  bool renormalize_final_attempt = false;
  // Keep case variants of generated answers apart; on by default for
  // synthetic sources only.
  std::optional<bool> case_sensitive_answers;
  std::optional<std::size_t> max_questions;
  std::uint64_t sample_seed = 0;

  // Relative paths resolve against `base_dir` (the config file's folder).
  static CampaignConfig from_json(const ojson& j, const std::filesystem::path& base_dir = {});
  static CampaignConfig load(const std::filesystem::path& path);
  ojson to_json() const;
  // Throws ConfigInvalid.
  void validate() const;

  const ModelEndpoint& endpoint(const std::string& key) const;
  std::filesystem::path records_path() const { return output_dir / "records.jsonl"; }
  std::vector<QARecord> load_questions() const;
  AnswerFolding answer_folding() const;
};

inline constexpr std::string_view kRecordSchema = "ipelicit.run_record";
inline constexpr int kRecordSchemaVersion = 1;

struct RecordKey {
  std::string question_id;
  std::string method;
  std::int64_t seed = 0;
  auto operator<=>(const RecordKey&) const = default;
};

struct ReferenceDistribution {
  std::vector<std::string> answers;
  std::vector<double> probs;
};

// {"scores", "decisions", "reference_values"} derived from the successful
// reports. Answer-level scores are used as first/second order when the
// prediction is in the candidate set, set-level scores otherwise.
ojson compute_scores(PromptKind method, const std::optional<CandidateSet>& candidates,
                     const std::vector<ElicitationResult>& reports,
                     const std::optional<std::string>& prediction,
                     const std::optional<ReferenceDistribution>& pstar);

// Elicits one (question, method, seed) and returns the serialized record.
// Transport failures propagate; every other failure yields status "failed".
using ClientMap = std::map<std::string, ChatClient*>;
ojson run_record(const CampaignConfig& config, const ClientMap& clients,
                 const QARecord& question, PromptKind method, std::int64_t seed);

// Recomputes `scores` and `reference_values` from the stored payloads.
ojson rescore_record(const ojson& record);

// Record line without the wall-clock `timing` member.
ojson strip_timing(ojson record);

struct CampaignSummary {
  std::size_t planned = 0;
  std::size_t skipped = 0;  // already present with status ok
  std::size_t written = 0;
  std::size_t failed = 0;
  std::filesystem::path records_path;
  bool partial() const { return failed > 0; }
};

struct RunHooks {
  // Client construction per endpoint; make_client by default.
  std::function<std::unique_ptr<ChatClient>(const ModelEndpoint&)> client_factory;
  // Called after each committed record, in commit order.
  std::function<void(const ojson&)> on_record;
};

// Runs or resumes a campaign. Existing ok records are skipped; the last line
// for a key wins. Throws EndpointUnreachable after committing every record
// that finished before the transport failure.
CampaignSummary run_campaign(const CampaignConfig& config, const RunHooks& hooks = {});

// Header plus records, in file order. Throws RecordParse.
std::vector<ojson> read_records(const std::filesystem::path& path);
// Last record per key.
std::map<RecordKey, ojson> latest_records(const std::vector<ojson>& records);
RecordKey record_key(const ojson& record);

}  // namespace ipelicit
