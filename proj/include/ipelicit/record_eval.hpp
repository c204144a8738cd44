#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipelicit/eval.hpp"
#include "ipelicit/json_io.hpp"

namespace ipelicit {

// Metric tables over persisted RunRecords. Only ok records with a non-null
// score (and label or reference) take part. AUROC and concordance are
// computed per (method, seed); the table reports their mean over seeds with
// stderr = std / sqrt(#seeds), and n = number of scored records.

// label: "ambiguous" or "incorrect" (the negation of labels.correct).
// score: a key of the record's `scores` object, e.g. first_order.
std::vector<MetricRow> auroc_table(std::span<const ojson> records, const std::string& label,
                                   const std::string& score, const std::string& dataset);

// ref: entropy_au or kl_eu from reference_values.
std::vector<MetricRow> concordance_table(std::span<const ojson> records, const std::string& ref,
                                         const std::string& score, const std::string& dataset);

// Usage of every stored elicitation, candidate generation included, priced by
// the given endpoints.
CostLedger ledger_from_records(std::span<const ojson> records,
                               std::span<const ModelEndpoint> endpoints);

}  // namespace ipelicit
