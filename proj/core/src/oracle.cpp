#include "mctslab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mctslab/errors.hpp"

namespace mctslab {

namespace {

void check_size(const SyntheticTree& tree) {
  if (tree.num_leaves() > 10'000'000) throw std::length_error("oracle: tree exceeds 10^7 leaves");
}

int first_argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

template <class Combine>
ExactValues backward_induction(const SyntheticTree& tree, Combine combine) {
  check_size(tree);
  const std::size_t k = static_cast<std::size_t>(tree.branching());
  ExactValues out;
  out.v.assign(tree.num_nodes(), 0.0);
  for (std::size_t i = tree.first_leaf(); i < tree.num_nodes(); ++i) out.v[i] = tree.leaf_mean(i);
  for (std::size_t i = tree.first_leaf(); i-- > 0;) {
    const std::span<const double> children(out.v.data() + i * k + 1, k);
    out.v[i] = combine(children);
  }
  out.best_action = first_argmax(std::span<const double>(out.v.data() + 1, k));
  return out;
}

// f with the p = 0 and p = 1 limits.
double f_alpha(double y, double p) {
  if (std::abs(p) < 1e-12) return y * std::log(y) - y + 1.0;
  if (std::abs(p - 1.0) < 1e-12) return y - std::log(y) - 1.0;
  return (std::pow(y, 1.0 - p) - p) / (p * (p - 1.0)) + y / p;
}

}  // namespace

ExactValues exact_values(const SyntheticTree& tree) {
  return backward_induction(tree, [](std::span<const double> c) { return *std::max_element(c.begin(), c.end()); });
}

ExactValues exact_regularized_values(const SyntheticTree& tree, const RegularizerKind& kind) {
  if (const auto* rel = std::get_if<reg::Relative>(&kind.variant());
      rel && rel->prior.size() != static_cast<std::size_t>(tree.branching())) {
    throw UsageError("exact_regularized_values: relative prior size differs from k");
  }
  return backward_induction(tree, [&kind](std::span<const double> c) { return value(kind, c); });
}

double entropic_objective(std::span<const double> values, std::span<const double> weights, double p,
                          double x) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += weights[i] * values[i] * f_alpha(x / values[i], p);
  return total;
}

double entropic_mean(std::span<const double> values, std::span<const double> weights, double alpha) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::domain_error("entropic_mean: values and weights must be non-empty and equal length");
  }
  double wsum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw std::domain_error("entropic_mean: values must be positive");
    }
    if (!(weights[i] >= 0.0)) throw std::domain_error("entropic_mean: negative weight");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::domain_error("entropic_mean: weights must sum to 1");
  const double p = 1.0 - alpha;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi == lo) return lo;

  const double tol = 1e-10 * std::max(1.0, hi);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = entropic_objective(values, weights, p, x1);
  double f2 = entropic_objective(values, weights, p, x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = entropic_objective(values, weights, p, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = entropic_objective(values, weights, p, x2);
    }
  }
  return 0.5 * (lo + hi);
}

RootErrors regret_and_errors(const SearchResult& result, std::size_t n_simulations, const SyntheticTree& tree,
                             const ExactValues& exact, const ExactValues* regularized) {
  if (result.root_choices.size() != n_simulations) {
    throw std::invalid_argument("regret_and_errors: recorded " + std::to_string(result.root_choices.size()) +
                                " root choices for " + std::to_string(n_simulations) + " simulations");
  }
  if (exact.v.size() != tree.num_nodes()) throw std::invalid_argument("regret_and_errors: oracle/tree mismatch");
  RootErrors out;
  const double v_star = exact.root();
  double chosen = 0.0;
  for (int a : result.root_choices) chosen += exact.v.at(tree.child(0, a));
  out.regret = static_cast<double>(n_simulations) * v_star - chosen;
  out.eps_uct = result.root_value - v_star;
  out.eps_omega = result.root_value - (regularized ? regularized->root() : v_star);
  return out;
}

}  // namespace mctslab
