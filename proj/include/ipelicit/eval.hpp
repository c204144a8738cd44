#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipelicit/client.hpp"
#include "ipelicit/report.hpp"

namespace ipelicit {

// Higher score means more uncertain; label 1 is the class expected to rank
// higher (ambiguous, or incorrect).
struct ScoredExample {
  double score = 0.0;
  int label = 0;
  std::optional<double> ref_value;
};

// P(score of a random positive > score of a random negative), ties 1/2.
// Throws DegenerateLabels when a class is missing, ValueOutOfRange for a
// label outside {0,1}.
double auroc(std::span<const ScoredExample> examples);
double auroc(std::span<const double> scores, std::span<const int> labels);

// Fraction of pairs with different reference values whose scores are ordered
// the same way; score ties 1/2, reference ties excluded. Throws AllRefsTied.
double concordance_index(std::span<const double> scores, std::span<const double> refs);

struct CostLine {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  double currency = 0.0;
};

// Token totals per (endpoint, method). Currency is always tokens times the
// endpoint's per-token prices, so merging ledgers is exactly additive in
// tokens.
class CostLedger {
 public:
  void add(const ModelEndpoint& endpoint, const std::string& method, const Usage& usage);
  // Throws ConfigInvalid when both ledgers price one endpoint differently.
  void merge(const CostLedger& other);

  std::vector<std::string> endpoints() const;
  std::vector<std::string> methods(const std::string& endpoint) const;
  CostLine endpoint_total(const std::string& endpoint) const;
  CostLine method_total(const std::string& endpoint, const std::string& method) const;
  CostLine total() const;
  bool empty() const { return usage_.empty(); }

 private:
  CostLine priced(const std::string& endpoint, const Usage& usage) const;

  std::map<std::string, std::pair<double, double>> prices_;
  std::map<std::pair<std::string, std::string>, Usage> usage_;
};

// Every result's endpoint must be among `endpoints` (UnknownEndpoint).
CostLedger cost_report(std::span<const ElicitationResult> results,
                       std::span<const ModelEndpoint> endpoints);

struct MetricRow {
  std::string method;
  std::string dataset;
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t n = 0;
};

// method,dataset,metric,value,stderr,n
void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace ipelicit
