#include "ipelicit/campaign.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ipelicit/decision.hpp"
#include "ipelicit/error.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/mock.hpp"
#include "ipelicit/scores.hpp"

namespace ipelicit {
namespace fs = std::filesystem;

namespace {

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::string dump_line(const ojson& j) {
  return j.dump(-1, ' ', false, nlohmann::detail::error_handler_t::replace);
}

ModelEndpoint endpoint_from_json(const ojson& j) {
  ModelEndpoint e;
  e.name = j.value("name", std::string());
  e.base_url = j.at("base_url").get<std::string>();
  e.model_id = j.value("model_id", std::string());
  e.auth_token_env = j.value("auth_token_env", std::string());
  if (j.contains("temperature") && !j["temperature"].is_null()) {
    e.temperature = j["temperature"].get<double>();
  }
  if (j.contains("seed") && !j["seed"].is_null()) e.seed = j["seed"].get<std::int64_t>();
  e.price_per_input_token = j.value("price_per_input_token", 0.0);
  e.price_per_output_token = j.value("price_per_output_token", 0.0);
  e.seed_supported = j.value("seed_supported", true);
  return e;
}

ojson endpoint_to_json(const ModelEndpoint& e) {
  return {{"name", e.name},
          {"base_url", e.base_url},
          {"model_id", e.model_id},
          {"auth_token_env", e.auth_token_env},
          {"temperature", opt(e.temperature)},
          {"seed", opt(e.seed)},
          {"price_per_input_token", e.price_per_input_token},
          {"price_per_output_token", e.price_per_output_token},
          {"seed_supported", e.seed_supported}};
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::optional<PrecisePMF> first_order_pmf(PromptKind method,
                                          const std::optional<CandidateSet>& candidates,
                                          const std::vector<const ElicitationResult*>& ok) {
  if (ok.empty()) return std::nullopt;
  if (method == PromptKind::kDefinetti) return std::get<PrecisePMF>(*ok.front()->payload);
  if (method == PromptKind::kCredal) {
    std::vector<PrecisePMF> members;
    for (const auto* r : ok) members.push_back(std::get<PrecisePMF>(*r->payload));
    return utilitarian_aggregate(CredalSet(*candidates, std::move(members)));
  }
  return std::nullopt;
}

ojson reference_values(const std::optional<CandidateSet>& candidates,
                       const std::optional<PrecisePMF>& p_hat,
                       const std::optional<ReferenceDistribution>& pstar) {
  if (!pstar) return nullptr;
  ojson out;
  out["entropy_au"] = entropy(pstar->probs);
  out["kl_eu"] = nullptr;
  out["cross_entropy"] = nullptr;
  out["smoothed"] = nullptr;
  if (!candidates || !p_hat) return out;
  // p* mapped onto the elicited candidates; defined only if no mass is lost.
  std::vector<double> mapped(candidates->size(), 0.0);
  for (std::size_t i = 0; i < pstar->answers.size(); ++i) {
    if (pstar->probs[i] == 0.0) continue;
    const auto idx = candidates->index_of(pstar->answers[i]);
    if (!idx) return out;
    mapped[*idx] += pstar->probs[i];
  }
  const auto d = ce_kl_decomposition(PrecisePMF(*candidates, mapped), *p_hat, true);
  out["entropy_au"] = d.entropy_au;
  out["kl_eu"] = d.kl_eu;
  out["cross_entropy"] = d.cross_entropy;
  out["smoothed"] = d.smoothed;
  return out;
}

std::int64_t member_seed(std::int64_t seed, int k) { return seed * 1000 + k; }

}  // namespace

CampaignConfig CampaignConfig::from_json(const ojson& j, const fs::path& base_dir) {
  CampaignConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("dataset") && !j["dataset"].is_null()) {
      const auto& d = j["dataset"];
      DatasetSource src;
      src.path = resolve(d.at("path").get<std::string>(), base_dir);
      src.format = dataset_format_from_string(d.value("format", std::string("maqa_like")));
      src.name = d.value("name", src.path.stem().string());
      c.dataset = src;
    }
    if (j.contains("synth") && !j["synth"].is_null()) {
      const auto& s = j["synth"];
      SynthSource src;
      if (s.contains("transform")) {
        src.spec = synth::TransformSpec::parse(s["transform"].get<std::string>());
      }
      if (s.value("shift_direction", std::string("left")) == "right") {
        src.spec.shift_direction = synth::ShiftDirection::kRight;
      }
      src.p = s.value("p", src.p);
      src.m = s.value("m", src.m);
      src.word_length = s.value("word_length", src.word_length);
      src.count = s.value("count", src.count);
      src.seed = s.value("seed", src.seed);
      c.synth = src;
    }
    for (const auto& m : j.at("methods")) c.methods.push_back(prompt_kind_from_string(m.get<std::string>()));
    for (const auto& e : j.at("endpoints")) c.endpoints.push_back(endpoint_from_json(e));
    c.elicitor = j.value("elicitor", std::string());
    c.generator = j.value("generator", std::string());
    c.retry_budget = j.value("retry_budget", c.retry_budget);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.output_dir = resolve(j.value("output_dir", c.output_dir.string()), base_dir);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::int64_t>>();
    c.credal_members = j.value("credal_members", c.credal_members);
    c.credal_quorum = j.value("credal_quorum", c.credal_quorum);
    c.enforce_upper = j.value("enforce_upper", c.enforce_upper);
    c.renormalize_final_attempt = j.value("renormalize_final_attempt", c.renormalize_final_attempt);
    if (j.contains("case_sensitive_answers") && !j["case_sensitive_answers"].is_null()) {
      c.case_sensitive_answers = j["case_sensitive_answers"].get<bool>();
    }
    if (j.contains("max_questions") && !j["max_questions"].is_null()) {
      c.max_questions = j["max_questions"].get<std::size_t>();
    }
    c.sample_seed = j.value("sample_seed", c.sample_seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("campaign config: ") + e.what());
  }
  for (auto& e : c.endpoints) {
    constexpr std::string_view kMock = "mock://";
    if (std::string_view(e.base_url).starts_with(kMock)) {
      e.base_url = std::string(kMock) +
                   resolve(e.base_url.substr(kMock.size()), base_dir).string();
    }
  }
  c.validate();
  return c;
}

CampaignConfig CampaignConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read config " + path.string());
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

ojson CampaignConfig::to_json() const {
  ojson j;
  j["name"] = name;
  if (dataset) {
    j["dataset"] = {{"path", dataset->path.string()},
                    {"format", ipelicit::to_string(dataset->format)},
                    {"name", dataset->name}};
  }
  if (synth) {
    j["synth"] = {{"transform", synth->spec.describe()},
                  {"shift_direction",
                   synth->spec.shift_direction == synth::ShiftDirection::kLeft ? "left" : "right"},
                  {"p", synth->p},
                  {"m", synth->m},
                  {"word_length", synth->word_length},
                  {"count", synth->count},
                  {"seed", synth->seed}};
  }
  ojson methods_json = ojson::array();
  for (auto m : methods) methods_json.push_back(ipelicit::to_string(m));
  j["methods"] = std::move(methods_json);
  ojson eps = ojson::array();
  for (const auto& e : endpoints) eps.push_back(endpoint_to_json(e));
  j["endpoints"] = std::move(eps);
  j["elicitor"] = elicitor;
  j["generator"] = generator;
  j["retry_budget"] = retry_budget;
  j["concurrency"] = concurrency;
  j["output_dir"] = output_dir.string();
  j["seeds"] = seeds;
  j["credal_members"] = credal_members;
  j["credal_quorum"] = credal_quorum;
  j["enforce_upper"] = enforce_upper;
  j["renormalize_final_attempt"] = renormalize_final_attempt;
  j["case_sensitive_answers"] = opt(case_sensitive_answers);
  j["max_questions"] = opt(max_questions);
  j["sample_seed"] = sample_seed;
  return j;
}

void CampaignConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigInvalid, msg); };
  if (methods.empty()) fail("at least one method is required");
  for (auto m : methods) {
    if (m == PromptKind::kCandidates) fail("'candidates' is generated per record, not a method");
  }
  if (endpoints.empty()) fail("at least one endpoint is required");
  if (seeds.empty()) fail("at least one seed is required");
  if (dataset.has_value() == synth.has_value()) fail("exactly one of dataset or synth is required");
  if (retry_budget < 1) fail("retry_budget must be at least 1");
  if (concurrency < 1) fail("concurrency must be at least 1");
  if (credal_members < 1) fail("credal_members must be at least 1");
  std::set<std::string> keys;
  for (const auto& e : endpoints) {
    e.validate();
    if (!keys.insert(e.key()).second) fail("duplicate endpoint " + e.key());
  }
  if (!elicitor.empty()) endpoint(elicitor);
  if (!generator.empty()) endpoint(generator);
}

const ModelEndpoint& CampaignConfig::endpoint(const std::string& key) const {
  if (key.empty()) return endpoints.front();
  for (const auto& e : endpoints) {
    if (e.key() == key) return e;
  }
  throw Error(ErrorCode::kConfigInvalid, "no endpoint named '" + key + "'");
}

std::vector<QARecord> CampaignConfig::load_questions() const {
  auto records = dataset ? ingest_qa_dataset(dataset->path, dataset->format)
                         : synth_records(*synth);
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDatasetParse, "duplicate question id '" + r.id + "'");
    }
  }
  if (max_questions) records = sample_records(std::move(records), *max_questions, sample_seed);
  return records;
}

AnswerFolding CampaignConfig::answer_folding() const {
  return case_sensitive_answers.value_or(synth.has_value()) ? AnswerFolding::kCaseSensitive
                                                            : AnswerFolding::kCaseInsensitive;
}

ojson compute_scores(PromptKind method, const std::optional<CandidateSet>& candidates,
                     const std::vector<ElicitationResult>& reports,
                     const std::optional<std::string>& prediction,
                     const std::optional<ReferenceDistribution>& pstar) {
  std::vector<const ElicitationResult*> ok;
  for (const auto& r : reports) {
    if (r.success && r.payload) ok.push_back(&r);
  }
  std::optional<std::size_t> pred;
  if (prediction && candidates) pred = candidates->index_of(*prediction);

  ojson s;
  s["level"] = pred ? "answer" : "set";
  for (const char* k : {"entropy", "bernoulli_entropy", "mmi_upper_bound", "interval_width",
                        "exact_mmi", "exact_mmi_events", "utilitarian_entropy",
                        "possibility_mmi", "possibility_answer_mmi", "vanilla_uncertainty",
                        "first_order", "second_order", "combined"}) {
    s[k] = nullptr;
  }
  ojson decisions = ojson::array();
  std::optional<double> first;
  std::optional<double> second;
  const auto p_hat = first_order_pmf(method, candidates, ok);

  if (!ok.empty()) {
    switch (method) {
      case PromptKind::kDefinetti: {
        s["entropy"] = entropy(*p_hat);
        first = entropy(*p_hat);
        if (pred) {
          s["bernoulli_entropy"] = bernoulli_entropy((*p_hat)[*pred]);
          first = bernoulli_entropy((*p_hat)[*pred]);
        }
        decisions.push_back(to_json(precise_argmax(*p_hat)));
        break;
      }
      case PromptKind::kProbint: {
        const auto& iv = std::get<ProbabilityIntervalSet>(*ok.front()->payload);
        const double ub = mmi_upper_bound(iv).value;
        s["mmi_upper_bound"] = ub;
        second = ub;
        if (pred) {
          const double w = interval_width_mmi(iv, *pred).value;
          s["interval_width"] = w;
          second = w;
        }
        decisions.push_back(to_json(maximin(iv)));
        decisions.push_back(to_json(maximax(iv)));
        break;
      }
      case PromptKind::kCredal: {
        std::vector<PrecisePMF> members;
        for (const auto* r : ok) members.push_back(std::get<PrecisePMF>(*r->payload));
        const CredalSet credal(*candidates, std::move(members));
        const double ub = mmi_upper_bound(credal).value;
        s["mmi_upper_bound"] = ub;
        second = ub;
        if (candidates->size() <= kExactEnumCap) {
          const auto exact = exact_mmi_credal(credal);
          s["exact_mmi"] = exact.value;
          s["exact_mmi_events"] = exact.event_count;
          second = exact.value;
        }
        s["utilitarian_entropy"] = entropy(*p_hat);
        first = entropy(*p_hat);
        const auto iv = interval_from_credal(credal);
        if (pred) {
          const double w = interval_width_mmi(iv, *pred).value;
          s["interval_width"] = w;
          s["bernoulli_entropy"] = bernoulli_entropy((*p_hat)[*pred]);
          first = bernoulli_entropy((*p_hat)[*pred]);
          second = w;
        }
        decisions.push_back(to_json(
            argmax_decision(*candidates, p_hat->probs(), DecisionRule::kUtilitarianArgmax)));
        decisions.push_back(to_json(maximin(iv)));
        decisions.push_back(to_json(maximax(iv)));
        break;
      }
      case PromptKind::kPossibility: {
        const auto& a = std::get<PossibilityAssignment>(*ok.front()->payload);
        const double m = possibility_mmi(a).value;
        s["possibility_mmi"] = m;
        second = m;
        if (pred) {
          const double am = possibility_answer_mmi(a, *pred).value;
          s["possibility_answer_mmi"] = am;
          second = am;
        }
        break;
      }
      case PromptKind::kVanilla: {
        const double u = 1.0 - std::get<double>(*ok.front()->payload);
        s["vanilla_uncertainty"] = u;
        first = u;
        break;
      }
      case PromptKind::kCandidates:
        break;
    }
  }
  s["first_order"] = opt(first);
  s["second_order"] = opt(second);
  if (first && second) s["combined"] = combined_score(*first, *second);

  ojson out;
  out["scores"] = std::move(s);
  out["decisions"] = std::move(decisions);
  out["reference_values"] = reference_values(candidates, p_hat, pstar);
  return out;
}

ojson run_record(const CampaignConfig& config, const ClientMap& clients,
                 const QARecord& question, PromptKind method, std::int64_t seed) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();

  ojson rec;
  rec["key"] = {{"question_id", question.id}, {"method", to_string(method)}, {"seed", seed}};
  rec["question"] = question.question;
  rec["candidates"] = nullptr;
  rec["truth_set"] = question.truth_set;
  rec["reference_answer"] = opt(question.reference_answer);
  rec["prediction"] = opt(question.prediction);
  rec["prediction_in_set"] = nullptr;
  rec["labels"] = {{"ambiguous", question.ambiguous()},
                   {"correct", question.prediction
                                   ? ojson(question.in_truth_set(*question.prediction))
                                   : ojson(nullptr)}};
  rec["status"] = "ok";
  rec["error"] = nullptr;
  rec["candidate_generation"] = nullptr;
  rec["reports"] = ojson::array();
  rec["ensemble"] = nullptr;
  rec["scores"] = nullptr;
  rec["decisions"] = ojson::array();
  rec["pstar"] = nullptr;
  rec["reference_values"] = nullptr;
  std::optional<ReferenceDistribution> pstar;
  if (question.pstar) {
    pstar = ReferenceDistribution{question.pstar_support(), *question.pstar};
    rec["pstar"] = {{"answers", pstar->answers}, {"probs", pstar->probs}};
  }

  ElicitOptions options;
  options.max_attempts = config.retry_budget;
  options.enforce_upper = config.enforce_upper;
  options.renormalize_final_attempt = config.renormalize_final_attempt;
  options.folding = config.answer_folding();

  auto client_for = [&](const ModelEndpoint& e) -> ChatClient& { return *clients.at(e.key()); };
  auto fail = [&](const std::string& msg) {
    rec["status"] = "failed";
    rec["error"] = msg;
  };

  std::optional<CandidateSet> candidates = question.candidates;
  std::vector<ElicitationResult> reports;
  try {
    if (!candidates && method != PromptKind::kVanilla) {
      ModelEndpoint gen = config.endpoint(config.generator);
      gen.seed = seed;
      try {
        auto r = elicit_with_retry(client_for(gen), gen, PromptKind::kCandidates,
                                   question.question, std::nullopt, options);
        candidates = std::get<CandidateSet>(*r.payload);
        rec["candidate_generation"] = to_json(r);
      } catch (const ElicitationFailure& f) {
        rec["candidate_generation"] = to_json(f.result());
        throw;
      }
    }
    if (candidates) {
      rec["candidates"] = to_json(*candidates);
      if (question.prediction) {
        rec["prediction_in_set"] = candidates->index_of(*question.prediction).has_value();
      }
    }

    if (method == PromptKind::kCredal) {
      std::vector<EnsembleMember> members;
      for (const auto& e : config.endpoints) {
        for (int k = 0; k < config.credal_members; ++k) {
          ModelEndpoint m = e;
          m.seed = member_seed(seed, k);
          members.push_back({&client_for(e), m});
        }
      }
      auto ens = run_credal_ensemble(members, question.question, *candidates, options,
                                     config.credal_quorum);
      reports = ens.members;
      ojson tags = ojson::array();
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (ens.members[i].success) tags.push_back(member_tag(members[i].endpoint, i));
      }
      rec["ensemble"] = {{"member_tags", std::move(tags)},
                         {"members", members.size()},
                         {"quorum", config.credal_quorum == 0 ? members.size()
                                                              : config.credal_quorum}};
      if (!ens.credal) fail(std::string(to_string(ErrorCode::kMemberQuorumNotMet)) + ": " + *ens.error);
    } else {
      ModelEndpoint e = config.endpoint(config.elicitor);
      e.seed = seed;
      std::optional<CandidateSet> shown = candidates;
      if (method == PromptKind::kVanilla) {
        shown.reset();
        if (question.prediction) shown = CandidateSet::make({*question.prediction});
      }
      try {
        reports.push_back(elicit_with_retry(client_for(e), e, method, question.question,
                                            shown, options));
      } catch (const ElicitationFailure& f) {
        reports.push_back(f.result());
        throw;
      }
    }
  } catch (const ElicitationFailure& f) {
    fail(f.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kTransportError) throw;
    fail(e.what());
  }

  ojson report_json = ojson::array();
  for (const auto& r : reports) report_json.push_back(to_json(r));
  rec["reports"] = std::move(report_json);

  if (rec["status"] == "ok") {
    auto derived = compute_scores(method, candidates, reports, question.prediction, pstar);
    rec["scores"] = std::move(derived["scores"]);
    rec["decisions"] = std::move(derived["decisions"]);
    rec["reference_values"] = std::move(derived["reference_values"]);
  }

  const auto elapsed = std::chrono::steady_clock::now() - t0;
  rec["timing"] = {
      {"started_unix_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                              started.time_since_epoch())
                              .count()},
      {"elapsed_ms",
       std::chrono::duration<double, std::milli>(elapsed).count()}};
  return rec;
}

ojson rescore_record(const ojson& record) {
  ojson out = record;
  if (record.at("status") != "ok") return out;
  try {
    const auto method = prompt_kind_from_string(record.at("key").at("method").get<std::string>());
    std::optional<CandidateSet> candidates;
    if (!record.at("candidates").is_null()) candidates = candidate_set_from_json(record["candidates"]);
    std::optional<std::string> prediction;
    if (!record.at("prediction").is_null()) prediction = record["prediction"].get<std::string>();
    std::optional<ReferenceDistribution> pstar;
    if (!record.at("pstar").is_null()) {
      pstar = ReferenceDistribution{
          record["pstar"].at("answers").get<std::vector<std::string>>(),
          record["pstar"].at("probs").get<std::vector<double>>()};
    }
    std::vector<ElicitationResult> reports;
    for (const auto& r : record.at("reports")) {
      reports.push_back(elicitation_result_from_json(r, candidates));
    }
    auto derived = compute_scores(method, candidates, reports, prediction, pstar);
    out["scores"] = std::move(derived["scores"]);
    out["decisions"] = std::move(derived["decisions"]);
    out["reference_values"] = std::move(derived["reference_values"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kRecordParse, std::string("rescore: ") + e.what());
  }
  return out;
}

ojson strip_timing(ojson record) {
  record.erase("timing");
  return record;
}

RecordKey record_key(const ojson& record) {
  try {
    const auto& k = record.at("key");
    return {k.at("question_id").get<std::string>(), k.at("method").get<std::string>(),
            k.at("seed").get<std::int64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kRecordParse, std::string("record key: ") + e.what());
  }
}

std::vector<ojson> read_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kRecordParse, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<ojson> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) break;  // unterminated tail from an interrupted write
    const std::string line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kRecordParse,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!header_seen) {
      if (j.value("schema", std::string()) != kRecordSchema ||
          j.value("version", 0) != kRecordSchemaVersion) {
        throw Error(ErrorCode::kRecordParse, path.string() + ": missing or unsupported header");
      }
      header_seen = true;
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::map<RecordKey, ojson> latest_records(const std::vector<ojson>& records) {
  std::map<RecordKey, ojson> out;
  for (const auto& r : records) {
    if (!r.contains("key")) continue;  // header
    out[record_key(r)] = r;
  }
  return out;
}

CampaignSummary run_campaign(const CampaignConfig& config, const RunHooks& hooks) {
  config.validate();
  const auto questions = config.load_questions();
  fs::create_directories(config.output_dir);
  const auto path = config.records_path();

  CampaignSummary summary;
  summary.records_path = path;

  std::set<RecordKey> done;
  bool need_header = true;
  if (fs::exists(path) && fs::file_size(path) > 0) {
    // Drop an unterminated tail left by an interrupted write.
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const auto last_nl = text.rfind('\n');
    const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (keep != text.size()) fs::resize_file(path, keep);
    if (keep > 0) {
      for (const auto& [key, rec] : latest_records(read_records(path))) {
        if (rec.at("status") == "ok") done.insert(key);
      }
      need_header = false;
    }
  }

  struct Job {
    const QARecord* question;
    PromptKind method;
    std::int64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& q : questions) {
    for (auto m : config.methods) {
      for (auto s : config.seeds) {
        ++summary.planned;
        if (done.count({q.id, std::string(to_string(m)), s})) {
          ++summary.skipped;
          continue;
        }
        jobs.push_back({&q, m, s});
      }
    }
  }

  std::map<std::string, std::unique_ptr<ChatClient>> owned;
  ClientMap clients;
  for (const auto& e : config.endpoints) {
    owned[e.key()] = hooks.client_factory ? hooks.client_factory(e) : make_client(e);
    clients[e.key()] = owned[e.key()].get();
  }

  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kConfigInvalid, "cannot write " + path.string());
  if (need_header) {
    out << dump_line(ojson{{"schema", kRecordSchema}, {"version", kRecordSchemaVersion}}) << '\n';
    out.flush();
  }

  std::vector<std::optional<ojson>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<char> finished(jobs.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      std::optional<ojson> rec;
      std::exception_ptr err;
      try {
        rec = run_record(config, clients, *jobs[i].question, jobs[i].method, jobs[i].seed);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        results[i] = std::move(rec);
        errors[i] = err;
        finished[i] = 1;
      }
      cv.notify_all();
    }
  };
  const auto n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);

  std::exception_ptr failure;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return finished[i] != 0; });
    if (errors[i]) {
      failure = errors[i];
      abort.store(true);
      break;
    }
    const ojson rec = std::move(*results[i]);
    results[i].reset();
    lock.unlock();
    out << dump_line(rec) << '\n';
    out.flush();
    ++summary.written;
    if (rec.at("status") != "ok") ++summary.failed;
    if (hooks.on_record) hooks.on_record(rec);
  }
  for (auto& t : pool) t.join();

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kTransportError) {
        throw Error(ErrorCode::kEndpointUnreachable, e.what());
      }
      throw;
    }
  }
  return summary;
}

}  // namespace ipelicit
