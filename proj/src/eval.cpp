#include "ipelicit/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "ipelicit/error.hpp"
#include "ipelicit/prompts.hpp"

namespace ipelicit {
namespace {

// Fenwick tree of counts over dense score ranks.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted ranks < i.
  std::uint64_t prefix(std::size_t i) const {
    std::uint64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  std::uint64_t half_wins = 0;  // 2 per won pair, 1 per tie
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t gp = 0;
    std::uint64_t gn = 0;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      const int label = labels[order[j]];
      if (label == 1) {
        ++gp;
      } else if (label == 0) {
        ++gn;
      } else {
        throw Error(ErrorCode::kValueOutOfRange, "label must be 0 or 1");
      }
    }
    half_wins += 2 * gp * negatives + gp * gn;
    positives += gp;
    negatives += gn;
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kDegenerateLabels, "AUROC needs both labels present");
  }
  return static_cast<double>(half_wins) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double auroc(std::span<const ScoredExample> examples) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& e : examples) {
    scores.push_back(e.score);
    labels.push_back(e.label);
  }
  return auroc(scores, labels);
}

double concordance_index(std::span<const double> scores, std::span<const double> refs) {
  if (scores.size() != refs.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and references differ in length");
  }
  if (scores.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "concordance needs at least two pairs");
  }
  std::vector<double> sorted_scores(scores.begin(), scores.end());
  std::sort(sorted_scores.begin(), sorted_scores.end());
  sorted_scores.erase(std::unique(sorted_scores.begin(), sorted_scores.end()),
                      sorted_scores.end());
  auto rank = [&](double s) {
    return static_cast<std::size_t>(
        std::lower_bound(sorted_scores.begin(), sorted_scores.end(), s) -
        sorted_scores.begin());
  };

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return refs[a] < refs[b]; });

  Fenwick seen(sorted_scores.size());
  std::uint64_t inserted = 0;
  std::uint64_t comparable = 0;
  std::uint64_t half_concordant = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    for (; j < order.size() && refs[order[j]] == refs[order[i]]; ++j) {
      const std::size_t r = rank(scores[order[j]]);
      const std::uint64_t below = seen.prefix(r);
      const std::uint64_t tied = seen.prefix(r + 1) - below;
      comparable += inserted;
      half_concordant += 2 * below + tied;
    }
    for (std::size_t k = i; k < j; ++k) {
      seen.add(rank(scores[order[k]]));
      ++inserted;
    }
    i = j;
  }
  if (comparable == 0) {
    throw Error(ErrorCode::kAllRefsTied, "every reference value is equal");
  }
  return static_cast<double>(half_concordant) / (2.0 * static_cast<double>(comparable));
}

void CostLedger::add(const ModelEndpoint& endpoint, const std::string& method,
                     const Usage& usage) {
  const auto key = endpoint.key();
  const std::pair<double, double> price{endpoint.price_per_input_token,
                                        endpoint.price_per_output_token};
  const auto [it, inserted] = prices_.emplace(key, price);
  if (!inserted && it->second != price) {
    throw Error(ErrorCode::kConfigInvalid, "endpoint " + key + " priced inconsistently");
  }
  usage_[{key, method}] += usage;
}

void CostLedger::merge(const CostLedger& other) {
  for (const auto& [key, price] : other.prices_) {
    const auto [it, inserted] = prices_.emplace(key, price);
    if (!inserted && it->second != price) {
      throw Error(ErrorCode::kConfigInvalid, "endpoint " + key + " priced inconsistently");
    }
  }
  for (const auto& [key, usage] : other.usage_) usage_[key] += usage;
}

std::vector<std::string> CostLedger::endpoints() const {
  std::vector<std::string> out;
  for (const auto& [key, price] : prices_) out.push_back(key);
  return out;
}

std::vector<std::string> CostLedger::methods(const std::string& endpoint) const {
  std::vector<std::string> out;
  for (const auto& [key, usage] : usage_) {
    if (key.first == endpoint) out.push_back(key.second);
  }
  return out;
}

CostLine CostLedger::priced(const std::string& endpoint, const Usage& usage) const {
  const auto it = prices_.find(endpoint);
  if (it == prices_.end()) throw Error(ErrorCode::kUnknownEndpoint, endpoint);
  CostLine line;
  line.input_tokens = usage.input_tokens;
  line.output_tokens = usage.output_tokens;
  line.currency = static_cast<double>(usage.input_tokens) * it->second.first +
                  static_cast<double>(usage.output_tokens) * it->second.second;
  return line;
}

CostLine CostLedger::endpoint_total(const std::string& endpoint) const {
  Usage sum;
  for (const auto& [key, usage] : usage_) {
    if (key.first == endpoint) sum += usage;
  }
  return priced(endpoint, sum);
}

CostLine CostLedger::method_total(const std::string& endpoint,
                                  const std::string& method) const {
  const auto it = usage_.find({endpoint, method});
  return priced(endpoint, it == usage_.end() ? Usage{} : it->second);
}

CostLine CostLedger::total() const {
  CostLine out;
  for (const auto& [key, price] : prices_) {
    const auto line = endpoint_total(key);
    out.input_tokens += line.input_tokens;
    out.output_tokens += line.output_tokens;
    out.currency += line.currency;
  }
  return out;
}

CostLedger cost_report(std::span<const ElicitationResult> results,
                       std::span<const ModelEndpoint> endpoints) {
  std::map<std::string, const ModelEndpoint*> known;
  for (const auto& e : endpoints) known[e.key()] = &e;
  CostLedger ledger;
  for (const auto& r : results) {
    const auto it = known.find(r.endpoint);
    if (it == known.end()) {
      throw Error(ErrorCode::kUnknownEndpoint, "result references unknown endpoint " + r.endpoint);
    }
    ledger.add(*it->second, std::string(to_string(r.kind)), r.usage());
  }
  return ledger;
}

void write_metric_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "method,dataset,metric,value,stderr,n\n";
  for (const auto& r : rows) {
    out << csv_field(r.method) << ',' << csv_field(r.dataset) << ',' << csv_field(r.metric)
        << ',' << g17(r.value) << ',' << g17(r.stderr_value) << ',' << r.n << '\n';
  }
}

}  // namespace ipelicit
