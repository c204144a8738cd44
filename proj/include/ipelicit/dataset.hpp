#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipelicit/synth.hpp"
#include "ipelicit/types.hpp"

namespace ipelicit {

// One question with its gold answers. Candidates are present when the
// dataset fixes them (multiple choice); otherwise they are generated.
struct QARecord {
  std::string id;
  std::string question;
  std::optional<CandidateSet> candidates;
  std::vector<std::string> truth_set;
  std::optional<std::string> reference_answer;
  std::optional<std::string> prediction;
  // Reference distribution, aligned with `candidates` when given, otherwise
  // with `truth_set`.
  std::optional<std::vector<double>> pstar;

  bool ambiguous() const { return truth_set.size() > 1; }
  bool in_truth_set(std::string_view answer) const;
  // Answers p* is defined over.
  const std::vector<std::string>& pstar_support() const;
};

enum class DatasetFormat { kMaqaLike, kAmbigqaLike, kMcLike };

std::string_view to_string(DatasetFormat format);
DatasetFormat dataset_format_from_string(std::string_view name);

// JSON-lines (.jsonl/.json) or CSV (.csv, list cells separated by '|').
// Fields: id, question, answers[], reference, options[], answer (option
// index, letter or text), prediction, pstar[], candidates[].
//
// Throws DatasetParse for an unreadable file, SchemaViolation (with the line
// number) for a malformed row.
std::vector<QARecord> ingest_qa_dataset(const std::filesystem::path& path,
                                        DatasetFormat format);

// Same rules applied to already-split rows; `line` is used in messages.
QARecord qa_record_from_json(const std::string& json_text, DatasetFormat format,
                             std::size_t line);

// Keeps `count` records chosen by `seed`, in their original order.
std::vector<QARecord> sample_records(std::vector<QARecord> records, std::size_t count,
                                     std::uint64_t seed);

// Synthetic ICL questions; every case variant of the clean output is correct.
struct SynthSource {
  synth::TransformSpec spec = synth::TransformSpec::base_setup();
  double p = 0.25;
  int m = 80;
  int word_length = 5;
  std::size_t count = 10;
  std::uint64_t seed = 0;
};
std::vector<QARecord> synth_records(const SynthSource& source);

}  // namespace ipelicit
