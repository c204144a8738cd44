#include "ipelicit/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> string_list(const json& row, const char* field, std::size_t line) {
  const auto& v = row.at(field);
  if (!v.is_array()) schema_error(line, std::string("'") + field + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) schema_error(line, std::string("'") + field + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::optional<std::string> optional_string(const json& row, const char* field,
                                           std::size_t line) {
  if (!row.contains(field) || row[field].is_null()) return std::nullopt;
  if (!row[field].is_string()) schema_error(line, std::string("'") + field + "' must be text");
  auto s = row[field].get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

bool has(const json& row, const char* field) {
  return row.contains(field) && !row[field].is_null();
}

std::size_t option_index(const json& key, const std::vector<std::string>& options,
                         std::size_t line) {
  if (key.is_number_integer()) {
    const auto i = key.get<std::int64_t>();
    if (i < 0 || static_cast<std::size_t>(i) >= options.size()) {
      schema_error(line, "answer index out of range");
    }
    return static_cast<std::size_t>(i);
  }
  if (!key.is_string()) schema_error(line, "'answer' must be an index, letter or option text");
  const auto text = key.get<std::string>();
  if (text.size() == 1 && text[0] >= 'A' && text[0] <= 'Z') {
    const auto i = static_cast<std::size_t>(text[0] - 'A');
    if (i >= options.size()) schema_error(line, "answer letter out of range");
    return i;
  }
  const auto folded = fold_answer(text);
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (fold_answer(options[i]) == folded) return i;
  }
  schema_error(line, "answer '" + text + "' is not among the options");
}

QARecord record_from_row(const json& row, DatasetFormat format, std::size_t line) {
  if (!row.is_object()) schema_error(line, "row is not an object");
  QARecord rec;
  const auto question = optional_string(row, "question", line);
  if (!question) schema_error(line, "missing 'question'");
  rec.question = *question;
  rec.id = optional_string(row, "id", line).value_or("q" + std::to_string(line));

  if (format == DatasetFormat::kMcLike) {
    if (!has(row, "options")) schema_error(line, "mc_like row needs 'options'");
    if (!has(row, "answer")) schema_error(line, "mc_like row needs 'answer'");
    auto options = string_list(row, "options", line);
    if (options.empty()) schema_error(line, "'options' is empty");
    try {
      rec.candidates = CandidateSet::make(options, false);
    } catch (const Error& e) {
      schema_error(line, e.what());
    }
    if (rec.candidates->size() != options.size()) schema_error(line, "duplicate options");
    const auto key = option_index(row["answer"], options, line);
    rec.reference_answer = options[key];
    rec.truth_set = has(row, "answers") ? string_list(row, "answers", line)
                                        : std::vector<std::string>{options[key]};
  } else {
    if (!has(row, "answers")) schema_error(line, "missing 'answers'");
    rec.truth_set = string_list(row, "answers", line);
    if (rec.truth_set.empty()) schema_error(line, "'answers' is empty");
    rec.reference_answer = optional_string(row, "reference", line);
    if (format == DatasetFormat::kAmbigqaLike && !rec.reference_answer) {
      schema_error(line, "ambigqa_like row needs 'reference'");
    }
    if (has(row, "candidates")) {
      try {
        rec.candidates = CandidateSet::make(string_list(row, "candidates", line), false);
      } catch (const Error& e) {
        schema_error(line, e.what());
      }
    }
  }
  if (rec.reference_answer && !rec.in_truth_set(*rec.reference_answer)) {
    schema_error(line, "reference answer is not in the gold answers");
  }
  rec.prediction = optional_string(row, "prediction", line);

  if (has(row, "pstar")) {
    if (!row["pstar"].is_array()) schema_error(line, "'pstar' must be a list");
    std::vector<double> p;
    for (const auto& v : row["pstar"]) {
      if (!v.is_number()) schema_error(line, "'pstar' must hold numbers");
      p.push_back(v.get<double>());
    }
    if (p.size() != rec.pstar_support().size()) {
      schema_error(line, "'pstar' length differs from its answer list");
    }
    double total = 0.0;
    for (double v : p) {
      if (v < 0.0 || v > 1.0) schema_error(line, "'pstar' entry outside [0,1]");
      total += v;
    }
    if (std::abs(total - 1.0) > kProbTolerance) schema_error(line, "'pstar' does not sum to 1");
    rec.pstar = std::move(p);
  }
  return rec;
}

// RFC 4180 records with their starting line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(const std::string& text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  std::size_t row_line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        fields.push_back(std::move(field));
        rows.emplace_back(row_line, std::move(fields));
      }
      fields.clear();
      field.clear();
      any = false;
      row_line = ++line;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) schema_error(row_line, "unterminated quoted field");
  if (any || !field.empty()) {
    fields.push_back(std::move(field));
    rows.emplace_back(row_line, std::move(fields));
  }
  return rows;
}

std::vector<std::string> split_cell(const std::string& cell) {
  std::vector<std::string> out;
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto bar = cell.find('|', start);
    out.push_back(cell.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

json csv_row_to_json(const std::vector<std::string>& header,
                     const std::vector<std::string>& cells, std::size_t line) {
  if (cells.size() != header.size()) {
    schema_error(line, "expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(cells.size()));
  }
  json row = json::object();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& name = header[i];
    const auto& cell = cells[i];
    if (cell.empty()) continue;
    if (name == "answers" || name == "options" || name == "candidates") {
      row[name] = split_cell(cell);
    } else if (name == "pstar") {
      json values = json::array();
      for (const auto& part : split_cell(cell)) {
        double v = 0.0;
        std::istringstream in(part);
        if (!(in >> v) || !(in >> std::ws).eof()) schema_error(line, "bad pstar value '" + part + "'");
        values.push_back(v);
      }
      row[name] = std::move(values);
    } else if (name == "answer" && std::all_of(cell.begin(), cell.end(), ::isdigit)) {
      row[name] = std::stoll(cell);
    } else {
      row[name] = cell;
    }
  }
  return row;
}

}  // namespace

bool QARecord::in_truth_set(std::string_view answer) const {
  const auto folded = fold_answer(answer);
  return std::any_of(truth_set.begin(), truth_set.end(),
                     [&](const std::string& t) { return fold_answer(t) == folded; });
}

const std::vector<std::string>& QARecord::pstar_support() const {
  return candidates ? candidates->answers() : truth_set;
}

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kMaqaLike: return "maqa_like";
    case DatasetFormat::kAmbigqaLike: return "ambigqa_like";
    case DatasetFormat::kMcLike: return "mc_like";
  }
  return "unknown";
}

DatasetFormat dataset_format_from_string(std::string_view name) {
  for (auto f : {DatasetFormat::kMaqaLike, DatasetFormat::kAmbigqaLike, DatasetFormat::kMcLike}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::kConfigInvalid, "unknown dataset format '" + std::string(name) + "'");
}

QARecord qa_record_from_json(const std::string& json_text, DatasetFormat format,
                             std::size_t line) {
  json row;
  try {
    row = json::parse(json_text);
  } catch (const json::exception& e) {
    schema_error(line, std::string("not JSON: ") + e.what());
  }
  try {
    return record_from_row(row, format, line);
  } catch (const json::exception& e) {
    schema_error(line, e.what());
  }
}

std::vector<QARecord> ingest_qa_dataset(const std::filesystem::path& path,
                                        DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kDatasetParse, "cannot read dataset " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<QARecord> out;
  if (path.extension() == ".csv") {
    auto rows = parse_csv(text);
    if (rows.empty()) return out;
    const auto header = rows.front().second;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& [line, cells] = rows[i];
      try {
        out.push_back(record_from_row(csv_row_to_json(header, cells, line), format, line));
      } catch (const json::exception& e) {
        schema_error(line, e.what());
      }
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(lines, line)) {
      ++number;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.push_back(qa_record_from_json(line, format, number));
    }
  }
  return out;
}

std::vector<QARecord> sample_records(std::vector<QARecord> records, std::size_t count,
                                     std::uint64_t seed) {
  if (count >= records.size()) return records;
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with an explicit draw so the subset is portable.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t span = idx.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::vector<QARecord> out;
  for (auto i : idx) out.push_back(std::move(records[i]));
  return out;
}

std::vector<QARecord> synth_records(const SynthSource& source) {
  std::vector<QARecord> out;
  for (std::size_t i = 0; i < source.count; ++i) {
    const std::uint64_t seed = source.seed + i;
    const auto task = synth::generate_icl_task(source.spec, {source.p, seed}, source.m,
                                               source.word_length, seed);
    QARecord rec;
    rec.id = "synth-" + std::to_string(i);
    rec.question = synth::render_icl_question(task);
    rec.reference_answer = task.clean_query_output;
    for (const auto& v : synth::ground_truth_variants(task.clean_query_output, source.p)) {
      rec.truth_set.push_back(v.text);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ipelicit
