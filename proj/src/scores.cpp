#include "ipelicit/scores.hpp"

#include <cmath>
#include <vector>

#include "ipelicit/error.hpp"

namespace ipelicit {

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double entropy(const PrecisePMF& p) { return entropy(p.probs()); }

double bernoulli_entropy(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::kValueOutOfRange,
                "Bernoulli parameter " + std::to_string(p));
  }
  const double q[2] = {p, 1.0 - p};
  return entropy(q);
}

Decomposition ce_kl_decomposition(const PrecisePMF& p_star,
                                  const PrecisePMF& p_hat, bool smooth) {
  if (!(p_star.candidates() == p_hat.candidates())) {
    throw Error(ErrorCode::kCandidateSetMismatch,
                "reference and predicted PMFs cover different candidates");
  }
  const std::size_t n = p_star.size();
  Decomposition d;
  std::vector<double> q(p_hat.probs().begin(), p_hat.probs().end());
  for (std::size_t i = 0; i < n; ++i) {
    if (p_star[i] > 0.0 && q[i] <= 0.0) d.smoothed = true;
  }
  if (d.smoothed) {
    if (!smooth) {
      throw Error(ErrorCode::kSupportMismatch,
                  "predicted PMF is zero where the reference has mass");
    }
    double total = 0.0;
    for (double& v : q) {
      v = std::max(v, kKlSmoothingFloor);
      total += v;
    }
    for (double& v : q) v /= total;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double ps = p_star[i];
    if (ps <= 0.0) continue;
    d.entropy_au -= ps * std::log(ps);
    d.cross_entropy -= ps * std::log(q[i]);
    d.kl_eu += ps * std::log(ps / q[i]);
  }
  // Gibbs: KL >= 0. Only rounding can push it below.
  if (d.kl_eu < 0.0) d.kl_eu = 0.0;
  return d;
}

double combined_score(double first_order, double second_order) {
  if (first_order < 0.0 || second_order < 0.0 || std::isnan(first_order) ||
      std::isnan(second_order)) {
    throw Error(ErrorCode::kNegativeScore, "scores must be non-negative");
  }
  return first_order * second_order;
}

}  // namespace ipelicit
