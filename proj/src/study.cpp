#include "ipelicit/study.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "ipelicit/error.hpp"
#include "ipelicit/mmi.hpp"
#include "ipelicit/scores.hpp"

namespace ipelicit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<StudyRow> run_synthetic_study(const StudyConfig& config,
                                          const ModelEndpoint& endpoint,
                                          const StudyClientFactory& factory) {
  if (config.p_grid.empty() || config.m_grid.empty() || config.repeats < 1) {
    throw Error(ErrorCode::kConfigInvalid, "study grids must be non-empty");
  }
  ElicitOptions options = config.options;
  options.folding = config.folding;
  std::vector<StudyRow> rows;
  for (double p : config.p_grid) {
    for (int m : config.m_grid) {
      auto client = factory(p, m);
      for (int rep = 0; rep < config.repeats; ++rep) {
        const std::uint64_t task_seed = config.seed + static_cast<std::uint64_t>(rep);
        const auto task = synth::generate_icl_task(config.spec, {p, task_seed}, m,
                                                   config.word_length, task_seed);
        const auto question = synth::render_icl_question(task);

        StudyRow row{p, m, rep, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
        ModelEndpoint e = endpoint;
        e.seed = static_cast<std::int64_t>(task_seed);
        const auto candidates = generate_candidates(*client, e, question, options);
        const std::string& prediction = candidates[0];
        row.error = synth::permissive_match(prediction, task.clean_query_output) ? 0.0 : 1.0;

        for (auto method : config.methods) {
          switch (method) {
            case PromptKind::kDefinetti: {
              auto r = elicit_with_retry(*client, e, method, question, candidates, options);
              row.entropy = *r.entropy;
              break;
            }
            case PromptKind::kProbint: {
              auto r = elicit_with_retry(*client, e, method, question, candidates, options);
              const auto& iv = std::get<ProbabilityIntervalSet>(*r.payload);
              row.probint_mmi = mmi_upper_bound(iv).value;
              row.probint_width = interval_width_mmi(iv, 0).value;
              break;
            }
            case PromptKind::kCredal: {
              std::vector<EnsembleMember> members;
              for (int k = 0; k < config.credal_members; ++k) {
                ModelEndpoint me = e;
                me.seed = static_cast<std::int64_t>(task_seed) * 1000 + k;
                members.push_back({client.get(), me});
              }
              const auto credal = elicit_credal_ensemble(members, question, candidates,
                                                         options);
              row.credal_upper_mmi = mmi_upper_bound(credal).value;
              if (candidates.size() <= kExactEnumCap) {
                row.credal_exact_mmi = exact_mmi_credal(credal).value;
              }
              break;
            }
            case PromptKind::kPossibility: {
              auto r = elicit_with_retry(*client, e, method, question, candidates, options);
              row.possibility_mmi =
                  possibility_mmi(std::get<PossibilityAssignment>(*r.payload)).value;
              break;
            }
            case PromptKind::kVanilla: {
              auto r = elicit_with_retry(*client, e, method, question,
                                         CandidateSet::make({prediction}), options);
              row.vanilla_uncertainty = 1.0 - std::get<double>(*r.payload);
              break;
            }
            case PromptKind::kCandidates:
              break;
          }
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<std::string> study_metric_names() {
  return {"error",         "entropy",          "vanilla_uncertainty", "probint_mmi",
          "probint_width", "credal_exact_mmi", "credal_upper_mmi",    "possibility_mmi"};
}

double study_metric(const StudyRow& row, const std::string& metric) {
  if (metric == "error") return row.error;
  if (metric == "entropy") return row.entropy;
  if (metric == "vanilla_uncertainty") return row.vanilla_uncertainty;
  if (metric == "probint_mmi") return row.probint_mmi;
  if (metric == "probint_width") return row.probint_width;
  if (metric == "credal_exact_mmi") return row.credal_exact_mmi;
  if (metric == "credal_upper_mmi") return row.credal_upper_mmi;
  if (metric == "possibility_mmi") return row.possibility_mmi;
  throw Error(ErrorCode::kConfigInvalid, "unknown study metric '" + metric + "'");
}

std::vector<StudyAggregate> aggregate_study(const std::vector<StudyRow>& rows) {
  std::vector<std::pair<double, int>> order;
  std::map<std::pair<double, int>, std::vector<const StudyRow*>> groups;
  for (const auto& r : rows) {
    const std::pair<double, int> key{r.p, r.m};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<StudyAggregate> out;
  for (const auto& key : order) {
    for (const auto& metric : study_metric_names()) {
      std::vector<double> values;
      for (const auto* r : groups[key]) {
        const double v = study_metric(*r, metric);
        if (!std::isnan(v)) values.push_back(v);
      }
      if (values.empty()) continue;
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      const double sd =
          values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
      out.push_back({key.first, key.second, metric, mean, sd, values.size()});
    }
  }
  return out;
}

void write_study_rows_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "p,m,repeat";
  for (const auto& name : study_metric_names()) out << ',' << name;
  out << '\n';
  for (const auto& r : rows) {
    out << g17(r.p) << ',' << r.m << ',' << r.repeat;
    for (const auto& name : study_metric_names()) {
      const double v = study_metric(r, name);
      out << ',';
      if (!std::isnan(v)) out << g17(v);
    }
    out << '\n';
  }
}

void write_study_csv(std::ostream& out, const std::vector<StudyAggregate>& rows) {
  out << "p,m,metric,mean,std,n\n";
  for (const auto& r : rows) {
    out << g17(r.p) << ',' << r.m << ',' << r.metric << ',' << g17(r.mean) << ','
        << g17(r.std) << ',' << r.n << '\n';
  }
}

}  // namespace ipelicit
