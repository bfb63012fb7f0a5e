#include "mctslab/power_mean.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mctslab {
namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

void validate(WeightedValues data) {
  if (data.values.empty()) {
    throw std::domain_error("power_mean: empty input");
  }
  if (data.values.size() != data.weights.size()) {
    throw std::domain_error("power_mean: values and weights differ in length");
  }
  for (double w : data.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::domain_error("power_mean: weights must be positive and finite");
    }
  }
  for (double x : data.values) {
    if (!std::isfinite(x)) {
      throw std::domain_error("power_mean: values must be finite");
    }
  }
}

bool is_integer(double p) { return std::floor(p) == p; }

}  // namespace

double power_mean(WeightedValues data, PowerExponent exponent) {
  validate(data);
  const auto [lo_it, hi_it] = std::minmax_element(data.values.begin(), data.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (exponent.is_max()) return hi;
  if (exponent.is_min()) return lo;

  const double p = exponent.value();
  if (std::fabs(p) < 1e-9) {
    throw std::domain_error("power_mean: exponent too close to zero");
  }
  if (lo < 0.0 && !is_integer(p)) {
    throw std::domain_error("power_mean: negative value with fractional exponent " +
                            std::to_string(p));
  }
  if (lo == hi) return lo;

  const double scale = std::max(std::fabs(lo), std::fabs(hi));
  if (p < 0.0) {
    for (double x : data.values) {
      if (x == 0.0) return 0.0;
    }
  }

  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    const long double x = static_cast<long double>(data.values[i]) / scale;
    num.add(static_cast<long double>(data.weights[i]) * std::pow(x, static_cast<long double>(p)));
    den.add(static_cast<long double>(data.weights[i]));
  }
  const long double ratio = num.value() / den.value();
  long double root;
  if (ratio < 0.0L) {
    // Only reachable for odd integer exponents.
    root = -std::pow(-ratio, 1.0L / static_cast<long double>(p));
  } else {
    root = std::pow(ratio, 1.0L / static_cast<long double>(p));
  }
  const double result = static_cast<double>(root * scale);
  return std::clamp(result, lo, hi);
}

double weighted_mean(WeightedValues data) {
  validate(data);
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    num.add(static_cast<long double>(data.weights[i]) * data.values[i]);
    den.add(data.weights[i]);
  }
  return static_cast<double>(num.value() / den.value());
}

namespace {

struct GapFunction {
  double p, q, a, b;
  double operator()(double x) const {
    return std::pow(x, 1.0 / p) - std::pow(std::max(a * x + b, 0.0), 1.0 / q);
  }
};

double golden_section_max(const GapFunction& h, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = h(x1);
  double f2 = h(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = h(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = h(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BoundConstants mean_gap_bounds(double l, double U, double p, double q) {
  // l == 0 is admitted and clamped below; rewards in [0, 1] start at zero.
  if (!(l >= 0.0) || !(U > 0.0) || l > U) {
    throw std::domain_error("mean_gap_bounds: requires 0 <= l <= U, U > 0");
  }
  if (!(p > q) || q < 1.0) {
    throw std::domain_error("mean_gap_bounds: requires p > q >= 1");
  }
  l = std::max(l, kMinLowerBound);
  if (l > U) l = U;

  BoundConstants out;
  out.l = l;
  out.U = U;
  out.p = p;
  out.q = q;
  if (l == U) {
    out.H = 0.0;
    out.L = 1.0;
    out.theta = 0.0;
    out.x_star = std::pow(l, p);
    return out;
  }

  const double lp = std::pow(l, p);
  const double Up = std::pow(U, p);
  const double lq = std::pow(l, q);
  const double Uq = std::pow(U, q);
  const GapFunction h{p, q, (Uq - lq) / (Up - lp), (Up * lq - Uq * lp) / (Up - lp)};

  // h need not be unimodal for q > 1; bracket the global maximum on a grid
  // before refining.
  constexpr int kGrid = 4096;
  const double step = (Up - lp) / kGrid;
  int best = 1;
  double best_val = h(lp + step);
  for (int i = 2; i < kGrid; ++i) {
    const double v = h(lp + i * step);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = lp + (best - 1) * step;
  const double hi = lp + (best + 1) * step;
  const double x_star = golden_section_max(h, lo, hi, 1e-10 * std::max(1.0, Up));

  out.x_star = x_star;
  out.theta = (x_star - lp) / (Up - lp);
  const double th = out.theta;
  out.H = std::pow(th * Up + (1.0 - th) * lp, 1.0 / p) -
          std::pow(th * Uq + (1.0 - th) * lq, 1.0 / q);

  const double C = U / l;
  const double Cp = std::pow(C, p);
  const double Cq = std::pow(C, q);
  out.L = std::pow(q * (Cp - Cq) / ((p - q) * (Cq - 1.0)), 1.0 / p) *
          std::pow(p * (Cq - Cp) / ((q - p) * (Cp - 1.0)), -1.0 / q);
  return out;
}

double power_mean_tail_bound(std::size_t n, double p, double epsilon, double l, double U) {
  if (n == 0) throw std::domain_error("power_mean_tail_bound: n must be >= 1");
  if (p < 1.0) throw std::domain_error("power_mean_tail_bound: p must be >= 1");
  if (!(epsilon > 0.0)) throw std::domain_error("power_mean_tail_bound: epsilon must be > 0");
  if (!(U > l)) throw std::domain_error("power_mean_tail_bound: requires U > l");
  const double H = (p == 1.0) ? 0.0 : mean_gap_bounds(std::max(l, kMinLowerBound), U, p, 1.0).H;
  const double width = U - l;
  return 2.0 * std::exp(H) *
         std::exp(-2.0 * epsilon * epsilon * static_cast<double>(n) / (width * width));
}

}  // namespace mctslab
