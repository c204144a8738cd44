#include "ipelicit/record_eval.hpp"

#include <cmath>
#include <map>

#include "ipelicit/error.hpp"

namespace ipelicit {
namespace {

struct Sample {
  double score;
  double target;  // label or reference value
};

using Groups = std::map<std::string, std::map<std::int64_t, std::vector<Sample>>>;

std::optional<double> number_at(const ojson& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) return std::nullopt;
  return obj[key].get<double>();
}

template <typename Target>
Groups group(std::span<const ojson> records, const std::string& score, Target target) {
  Groups out;
  for (const auto& r : records) {
    if (!r.contains("key") || r.at("status") != "ok") continue;
    const auto s = number_at(r.at("scores"), score);
    const auto t = target(r);
    if (!s || !t) continue;
    const auto& k = r["key"];
    out[k.at("method").get<std::string>()][k.at("seed").get<std::int64_t>()].push_back({*s, *t});
  }
  return out;
}

template <typename Metric>
std::vector<MetricRow> table(const Groups& groups, const std::string& metric_name,
                             const std::string& dataset, Metric metric) {
  std::vector<MetricRow> rows;
  for (const auto& [method, seeds] : groups) {
    std::vector<double> values;
    std::size_t n = 0;
    for (const auto& [seed, samples] : seeds) {
      std::vector<double> scores;
      std::vector<double> targets;
      for (const auto& s : samples) {
        scores.push_back(s.score);
        targets.push_back(s.target);
      }
      values.push_back(metric(scores, targets));
      n += samples.size();
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double se = 0.0;
    if (values.size() > 1) {
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size() - 1);
      se = std::sqrt(var) / std::sqrt(static_cast<double>(values.size()));
    }
    rows.push_back({method, dataset, metric_name, mean, se, n});
  }
  return rows;
}

}  // namespace

std::vector<MetricRow> auroc_table(std::span<const ojson> records, const std::string& label,
                                   const std::string& score, const std::string& dataset) {
  if (label != "ambiguous" && label != "incorrect") {
    throw Error(ErrorCode::kConfigInvalid, "label must be 'ambiguous' or 'incorrect'");
  }
  const auto groups = group(records, score, [&](const ojson& r) -> std::optional<double> {
    const auto& labels = r.at("labels");
    if (label == "ambiguous") return labels.at("ambiguous").get<bool>() ? 1.0 : 0.0;
    if (labels.at("correct").is_null()) return std::nullopt;
    return labels["correct"].get<bool>() ? 0.0 : 1.0;
  });
  return table(groups, "auroc_" + label + "_" + score, dataset,
               [](const std::vector<double>& s, const std::vector<double>& t) {
                 std::vector<int> labels;
                 for (double v : t) labels.push_back(static_cast<int>(v));
                 return auroc(s, labels);
               });
}

std::vector<MetricRow> concordance_table(std::span<const ojson> records, const std::string& ref,
                                         const std::string& score, const std::string& dataset) {
  if (ref != "entropy_au" && ref != "kl_eu") {
    throw Error(ErrorCode::kConfigInvalid, "reference must be 'entropy_au' or 'kl_eu'");
  }
  const auto groups = group(records, score, [&](const ojson& r) {
    return number_at(r.at("reference_values"), ref);
  });
  return table(groups, "concordance_" + ref + "_" + score, dataset,
               [](const std::vector<double>& s, const std::vector<double>& t) {
                 return concordance_index(s, t);
               });
}

CostLedger ledger_from_records(std::span<const ojson> records,
                               std::span<const ModelEndpoint> endpoints) {
  std::vector<ElicitationResult> results;
  for (const auto& r : records) {
    if (!r.contains("key")) continue;
    std::optional<CandidateSet> candidates;
    if (!r.at("candidates").is_null()) candidates = candidate_set_from_json(r["candidates"]);
    if (!r.at("candidate_generation").is_null()) {
      results.push_back(elicitation_result_from_json(r["candidate_generation"], std::nullopt));
    }
    for (const auto& rep : r.at("reports")) {
      results.push_back(elicitation_result_from_json(rep, candidates));
    }
  }
  return cost_report(results, endpoints);
}

}  // namespace ipelicit
