#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mctslab/envs/synthetic_tree.hpp"
#include "mctslab/regularizer.hpp"
#include "mctslab/tree.hpp"

namespace mctslab {

/// Per-node values of a synthetic tree in heap order.
struct ExactValues {
  std::vector<double> v;
  /// Optimal root action (first maximizer of the root children's values).
  int best_action = 0;

  double root() const { return v.front(); }
};

/// V*(leaf) = leaf mean, V*(internal) = max over children. Undiscounted.
/// Throws std::length_error when the tree has more than 10^7 leaves.
ExactValues exact_values(const SyntheticTree& tree);

/// Backward induction with V*_Omega(internal) = value(kind, children). A
/// Relative kind must carry a prior of size k (UsageError otherwise). best_action is the argmax of
/// the children's regularized values.
ExactValues exact_regularized_values(const SyntheticTree& tree, const RegularizerKind& kind);

/// Minimizes sum_i w_i a_i f(x / a_i) over x > 0 by golden-section search on
/// [min a, max a], with f(x) = (x^(1-p) - p) / (p (p - 1)) + x / p and
/// p = 1 - alpha (limits taken at p = 0 and p = 1). The minimizer equals the
/// weighted power mean of order p. Throws std::domain_error for non-positive
/// values, weights that do not sum to 1 within 1e-9, or mismatched sizes.
double entropic_mean(std::span<const double> values, std::span<const double> weights, double alpha);

/// The objective minimized by entropic_mean, exposed for tests.
double entropic_objective(std::span<const double> values, std::span<const double> weights, double p,
                          double x);

struct RootErrors {
  double regret = 0.0;     ///< R_n = n V* - sum_t V*(child chosen at t)
  double eps_omega = 0.0;  ///< root value - V*_Omega
  double eps_uct = 0.0;    ///< root value - V*
};

/// Regret and value errors of one search on `tree`. `regularized` may be
/// null, in which case V*_Omega = V*. Throws std::invalid_argument when the
/// recorded root choices do not number `n_simulations`.
RootErrors regret_and_errors(const SearchResult& result, std::size_t n_simulations, const SyntheticTree& tree,
                             const ExactValues& exact, const ExactValues* regularized);

}  // namespace mctslab
