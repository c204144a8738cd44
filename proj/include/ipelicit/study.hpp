#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ipelicit/client.hpp"
#include "ipelicit/elicit.hpp"
#include "ipelicit/synth.hpp"

namespace ipelicit {

struct StudyConfig {
  synth::TransformSpec spec = synth::TransformSpec::base_setup();
  std::vector<double> p_grid{0.25};
  std::vector<int> m_grid{80};
  int repeats = 5;
  int word_length = 5;
  std::uint64_t seed = 0;
  std::vector<PromptKind> methods{PromptKind::kDefinetti, PromptKind::kProbint,
                                  PromptKind::kCredal, PromptKind::kPossibility,
                                  PromptKind::kVanilla};
  int credal_members = 3;
  ElicitOptions options;
  // Case variants are distinct outcomes here; overrides options.folding.
  AnswerFolding folding = AnswerFolding::kCaseSensitive;
};

// Per (p, m, repeat) measurements; NaN where a method was not run.
struct StudyRow {
  double p = 0.0;
  int m = 0;
  int repeat = 0;
  double error = 0.0;  // 1 when the prediction fails the permissive match
  double entropy = 0.0;                // definetti, set level
  double vanilla_uncertainty = 0.0;    // 1 - confidence
  double probint_mmi = 0.0;            // upper bound
  double probint_width = 0.0;          // interval width of the prediction
  double credal_exact_mmi = 0.0;
  double credal_upper_mmi = 0.0;
  double possibility_mmi = 0.0;
};

struct StudyAggregate {
  double p = 0.0;
  int m = 0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over repeats
  std::size_t n = 0;
};

// Client for one grid point, so a simulated agent can be told the noise
// level; the same client serves every repeat of that point.
using StudyClientFactory = std::function<std::unique_ptr<ChatClient>(double p, int m)>;

// Generates a task per (p, m, repeat), generates candidates, takes the first
// as the prediction and elicits every configured method. Repeat r uses task
// seed `seed + r` at every grid point.
std::vector<StudyRow> run_synthetic_study(const StudyConfig& config,
                                          const ModelEndpoint& endpoint,
                                          const StudyClientFactory& factory);

std::vector<std::string> study_metric_names();
double study_metric(const StudyRow& row, const std::string& metric);

// Mean and standard deviation per (p, m, metric), grid order.
std::vector<StudyAggregate> aggregate_study(const std::vector<StudyRow>& rows);

// p,m,repeat,<metrics...>
void write_study_rows_csv(std::ostream& out, const std::vector<StudyRow>& rows);
// p,m,metric,mean,std,n
void write_study_csv(std::ostream& out, const std::vector<StudyAggregate>& rows);

}  // namespace ipelicit
