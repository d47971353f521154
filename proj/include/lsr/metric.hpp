#pragma once

#include <span>

#include "lsr/types.hpp"

namespace lsr {

/// ||z1 - z2|| under the given metric. Throws std::invalid_argument on
/// dimension mismatch.
double distance(const Vector& z1, const Vector& z2, Metric m);

/// True iff the distance between the two points is strictly below eps.
/// Early-exits as soon as the partial accumulation reaches eps, which makes
/// the all-pairs clustering scans cheap for well-separated data.
bool within_epsilon(const double* a, const double* b, Eigen::Index dim,
                    Metric m, double eps);

inline bool within_epsilon(const Vector& a, const Vector& b, Metric m,
                           double eps) {
  return within_epsilon(a.data(), b.data(), a.size(), m, eps);
}

/// Subgradient of diff -> ||diff|| at the given point. Conventions at
/// non-differentiable points: L1 uses sign with sign(0) = 0; L2 at the
/// origin returns zero; Linf sends the whole gradient to the first maximal
/// coordinate (by index).
Vector metric_subgradient(const Vector& diff, Metric m);

/// eps = mu0 + w_eps * sigma0 over the pairwise distances ||z1 - z2|| of the
/// given no-action tuples. sigma0 is the population standard deviation.
/// Throws std::invalid_argument if the list is empty or contains an action
/// tuple, and std::runtime_error if the result is not positive.
double estimate_epsilon(std::span<const TransitionTuple> no_action_pairs,
                        Metric m, double w_eps);

/// Same estimator on precomputed distances.
double estimate_epsilon_from_distances(std::span<const double> distances,
                                       double w_eps);

}  // namespace lsr
