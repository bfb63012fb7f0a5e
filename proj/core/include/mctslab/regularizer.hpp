#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace mctslab {

/// A probability vector over actions. Entries are >= 0 and sum to 1 within 1e-9.
using Simplex = std::vector<double>;

/// Action values Q(s, .) at one node; one entry per legal action.
using QVector = std::vector<double>;

namespace reg {

struct Shannon {};

/// KL divergence to a prior policy (typically the node's previous policy).
struct Relative {
  Simplex prior;
};

struct Tsallis {};

/// alpha-divergence family. alpha == 1 dispatches to Shannon, alpha == 2 to
/// Tsallis; other values solve for the normalizing threshold numerically.
struct AlphaDiv {
  double alpha = 2.0;
};

}  // namespace reg

/// A convex regularizer Omega together with its temperature tau.
class RegularizerKind {
 public:
  using Variant = std::variant<reg::Shannon, reg::Relative, reg::Tsallis, reg::AlphaDiv>;

  /// Throws std::invalid_argument when tau <= 0, alpha <= 0, or the prior is
  /// not a strictly positive simplex point.
  RegularizerKind(Variant variant, double tau);

  static RegularizerKind shannon(double tau) { return {reg::Shannon{}, tau}; }
  static RegularizerKind relative(Simplex prior, double tau) {
    return {reg::Relative{std::move(prior)}, tau};
  }
  /// Relative entropy with a uniform prior over n actions.
  static RegularizerKind relative_uniform(std::size_t n, double tau);
  static RegularizerKind tsallis(double tau) { return {reg::Tsallis{}, tau}; }
  static RegularizerKind alpha_div(double alpha, double tau) { return {reg::AlphaDiv{alpha}, tau}; }

  const Variant& variant() const { return variant_; }
  double tau() const { return tau_; }

  bool is_relative() const { return std::holds_alternative<reg::Relative>(variant_); }
  /// True for the kinds whose policy can put zero mass on an action.
  bool is_sparse() const;

  /// Same kind with the relative prior replaced. No-op for other kinds.
  RegularizerKind with_prior(Simplex prior) const;

  /// Builds a kind without validating tau or the prior. Used to inject faults
  /// into the verification suites.
  static RegularizerKind unchecked(Variant variant, double tau);

 private:
  struct Unchecked {};
  RegularizerKind(Unchecked, Variant variant, double tau)
      : variant_(std::move(variant)), tau_(tau) {}

  Variant variant_;
  double tau_;
};

/// Ordered set of actions with non-zero probability under a sparse policy.
struct SparseSupport {
  std::vector<std::size_t> indices;  // in descending order of q, ties by index
  std::size_t size() const { return indices.size(); }
};

/// Omega*(q): the regularized value, max over pi of <pi, q> - tau Omega(pi).
double value(const RegularizerKind& kind, std::span<const double> q);

/// grad Omega*(q): the maximizing policy.
Simplex policy(const RegularizerKind& kind, std::span<const double> q);

/// Support of the policy for Tsallis and alpha > 1. Throws UsageError for
/// kinds with full support.
SparseSupport support(const RegularizerKind& kind, std::span<const double> q);

/// Omega(pi) with the convention that lower means more entropic
/// (Shannon: sum pi log pi, Tsallis: (|pi|^2 - 1) / 2).
double regularizer_value(const RegularizerKind& kind, std::span<const double> pi);

/// Range [L, U] of Omega over the simplex for |A| = n actions.
struct RegularizerRange {
  double lower;
  double upper;
};
RegularizerRange regularizer_range(const RegularizerKind& kind, std::size_t n);

namespace detail {

/// alpha-divergence policy via the numerical threshold, for any alpha > 0,
/// alpha != 1. At alpha == 2 it agrees with sparsemax.
Simplex alpha_policy_general(std::span<const double> q, double tau, double alpha);

/// Normalizing threshold mu (in units of q / tau) of the alpha policy.
double alpha_threshold(std::span<const double> x, double alpha);

}  // namespace detail

}  // namespace mctslab
