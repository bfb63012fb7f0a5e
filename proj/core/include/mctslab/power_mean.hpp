#pragma once

#include <cstddef>
#include <limits>
#include <span>

namespace mctslab {

/// Exponent of a weighted power mean. Holds a finite real or one of the
/// +inf (maximum) / -inf (minimum) sentinels.
class PowerExponent {
 public:
  constexpr explicit PowerExponent(double p) : p_(p) {}

  static constexpr PowerExponent maximum() {
    return PowerExponent(std::numeric_limits<double>::infinity());
  }
  static constexpr PowerExponent minimum() {
    return PowerExponent(-std::numeric_limits<double>::infinity());
  }

  constexpr double value() const { return p_; }
  constexpr bool is_max() const { return p_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_min() const { return p_ == -std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const { return !is_max() && !is_min(); }

  friend constexpr bool operator==(PowerExponent, PowerExponent) = default;

 private:
  double p_;
};

/// Payoffs and their positive weights, viewed (not owned).
struct WeightedValues {
  std::span<const double> values;
  std::span<const double> weights;
};

/// Weighted power mean (sum w x^p / sum w)^(1/p).
///
/// The sum is accumulated in long double with Neumaier compensation after
/// factoring out max|x|, so exponents in the tens stay well conditioned.
/// Throws std::domain_error for empty or mismatched input, non-positive
/// weights, |p| < 1e-9, or negative values with a non-integer exponent.
double power_mean(WeightedValues data, PowerExponent p);

/// Weighted arithmetic mean; equivalent to power_mean with p = 1.
double weighted_mean(WeightedValues data);

/// Constants bounding the gap between power means of orders p > q for
/// payoffs in [l, U].
struct BoundConstants {
  double l = 0.0;
  double U = 0.0;
  double p = 1.0;
  double q = 1.0;
  double H = 0.0;      ///< additive bound: M[p] - M[q] <= H
  double L = 1.0;      ///< ratio bound: M[p] / M[q] <= L
  double theta = 0.0;  ///< mixing weight of the extremal two-point distribution
  double x_star = 0.0; ///< maximizer of h(x) = x^(1/p) - (a x + b)^(1/q) on (l^p, U^p)
};

/// Lower bounds below this are raised to it before computing the constants.
inline constexpr double kMinLowerBound = 1e-6;

/// Computes H_{p,q}, L_{p,q} and theta for payoffs in [l, U].
///
/// x_star is located by a coarse grid scan followed by golden-section
/// refinement to an interval width of 1e-10 (relative to U^p). Requires
/// 0 < l <= U and p > q >= 1; l is clamped to kMinLowerBound first.
BoundConstants mean_gap_bounds(double l, double U, double p, double q);

/// Two-sided concentration bound for an equal-weight power mean of n
/// payoffs in [l, U] around their common mean:
///   2 exp(H_{p,1}) exp(-2 eps^2 n / (U - l)^2).
/// For p == 1 this is the classic Hoeffding bound.
double power_mean_tail_bound(std::size_t n, double p, double epsilon, double l, double U);

}  // namespace mctslab
