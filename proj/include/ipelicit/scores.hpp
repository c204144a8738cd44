#pragma once

#include <span>

#include "ipelicit/types.hpp"

namespace ipelicit {

// Natural logarithms throughout.

// Shannon entropy with 0 log 0 = 0.
double entropy(std::span<const double> probs);
double entropy(const PrecisePMF& p);

double bernoulli_entropy(double p);

// Floor applied to the predicted distribution when it misses support of the
// reference distribution.
inline constexpr double kKlSmoothingFloor = 1e-9;

struct Decomposition {
  double cross_entropy = 0.0;  // CE(p*, p_hat)
  double entropy_au = 0.0;     // H(p*)
  double kl_eu = 0.0;          // KL(p* || p_hat)
  bool smoothed = false;       // p_hat was floored and renormalized
};

// CE(p*, p_hat) = H(p*) + KL(p* || p_hat). When p_hat has zeros where p* has
// mass and `smooth` is set, p_hat is floored at kKlSmoothingFloor and
// renormalized first; otherwise SupportMismatch.
Decomposition ce_kl_decomposition(const PrecisePMF& p_star,
                                  const PrecisePMF& p_hat, bool smooth = true);

// Product of a first-order and a second-order score.
double combined_score(double first_order, double second_order);

}  // namespace ipelicit
