#include "mctslab/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "mctslab/errors.hpp"

namespace mctslab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_q(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("regularizer: empty QVector");
  for (double v : q) {
    if (!std::isfinite(v)) throw std::invalid_argument("regularizer: non-finite Q value");
  }
}

void check_prior(const Simplex& prior) {
  if (prior.empty()) throw std::invalid_argument("relative prior is empty");
  double total = 0.0;
  for (double p : prior) {
    if (!(p > 0.0)) throw std::invalid_argument("relative prior must be strictly positive");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("relative prior must sum to 1");
  }
}

void check_prior_size(const reg::Relative& r, std::size_t n) {
  if (r.prior.size() != n) {
    throw std::invalid_argument("relative prior has " + std::to_string(r.prior.size()) +
                                " entries, Q has " + std::to_string(n));
  }
}

// Indices sorted by descending value; stable so ties keep action order.
std::vector<std::size_t> descending_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return order;
}

// (q - max q) / tau. Keeping the largest entry at 0 puts the alpha threshold
// at O(1), where bisection resolves it to a few ulps.
std::vector<double> scaled(std::span<const double> q, double tau) {
  const double m = *std::max_element(q.begin(), q.end());
  std::vector<double> x(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) x[i] = (q[i] - m) / tau;
  return x;
}

// --- Shannon / Relative -----------------------------------------------------

double log_sum_exp_value(std::span<const double> q, double tau, const Simplex* prior) {
  const double m = *std::max_element(q.begin(), q.end());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = prior ? (*prior)[i] : 1.0;
    total += w * std::exp((q[i] - m) / tau);
  }
  return m + tau * std::log(total);
}

Simplex softmax_policy(std::span<const double> q, double tau, const Simplex* prior) {
  const double m = *std::max_element(q.begin(), q.end());
  Simplex pi(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double w = prior ? (*prior)[i] : 1.0;
    pi[i] = w * std::exp((q[i] - m) / tau);
    total += pi[i];
  }
  for (double& p : pi) p /= total;
  return pi;
}

// --- Tsallis ------------------------------------------------------------------

struct SparsemaxSolution {
  std::vector<std::size_t> support;
  double threshold;  // in units of q / tau
};

SparsemaxSolution sparsemax_support(std::span<const double> x) {
  const auto order = descending_order(x);
  double cumulative = 0.0;
  std::size_t k = 0;
  double support_sum = 0.0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    const double xi = x[order[i - 1]];
    cumulative += xi;
    if (1.0 + static_cast<double>(i) * xi > cumulative) {
      k = i;
      support_sum = cumulative;
    }
  }
  SparsemaxSolution out;
  out.support.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  out.threshold = (support_sum - 1.0) / static_cast<double>(k);
  return out;
}

double tsallis_value(std::span<const double> q, double tau) {
  const double m = *std::max_element(q.begin(), q.end());
  std::vector<double> x(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) x[i] = (q[i] - m) / tau;
  const auto sol = sparsemax_support(x);
  double squares = 0.0;
  double sum = 0.0;
  for (std::size_t a : sol.support) {
    squares += x[a] * x[a];
    sum += x[a];
  }
  const double k = static_cast<double>(sol.support.size());
  const double spmax = 0.5 * squares - (sum - 1.0) * (sum - 1.0) / (2.0 * k) + 0.5;
  return m + tau * spmax;
}

Simplex tsallis_policy(std::span<const double> q, double tau) {
  const double m = *std::max_element(q.begin(), q.end());
  std::vector<double> x(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) x[i] = (q[i] - m) / tau;
  const auto sol = sparsemax_support(x);
  Simplex pi(q.size(), 0.0);
  for (std::size_t a : sol.support) pi[a] = std::max(x[a] - sol.threshold, 0.0);
  return pi;
}

// --- alpha-divergence -----------------------------------------------------------

// The alpha policy is (alpha - 1)(x - mu) raised to 1/(alpha - 1), which for
// large alpha magnifies rounding in mu enormously; the threshold and masses
// are therefore computed in long double.
long double alpha_mass(long double base, double alpha) {
  return base > 0.0L ? std::pow(base, 1.0L / (alpha - 1.0L)) : 0.0L;
}

long double alpha_excess(std::span<const double> x, long double mu, double alpha) {
  long double total = 0.0L;
  for (double xi : x) total += alpha_mass((alpha - 1.0L) * (xi - mu), alpha);
  return total - 1.0L;
}

/// Final bisection bracket [lo, hi] of the threshold; adjacent long doubles
/// unless the iteration cap was hit first.
std::pair<long double, long double> alpha_bracket(std::span<const double> x, double alpha) {
  if (alpha == 1.0) throw UsageError("alpha_threshold: alpha == 1 has no threshold form");
  const long double xmax = *std::max_element(x.begin(), x.end());
  const long double n = static_cast<long double>(x.size());
  // excess(mu) is decreasing in mu; bracket with excess(lo) >= 0 >= excess(hi).
  long double lo, hi;
  if (alpha > 1.0) {
    lo = xmax - 1.0L / (alpha - 1.0L);
    hi = xmax;
  } else {
    lo = xmax + 1.0L / (1.0L - alpha);
    hi = xmax + std::pow(n, 1.0L - alpha) / (1.0L - alpha);
  }
  for (int it = 0; it < 400; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (alpha_excess(x, mid, alpha) > 0.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

long double alpha_threshold_ld(std::span<const double> x, double alpha) {
  const auto [lo, hi] = alpha_bracket(x, alpha);
  return 0.5L * (lo + hi);
}

double alpha_regularizer(std::span<const double> pi, double alpha) {
  double total = 0.0;
  for (double p : pi) total += std::pow(p, alpha);
  return (total - 1.0) / (alpha * (alpha - 1.0));
}

double dispatch_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return alpha;
}

}  // namespace

namespace detail {

double alpha_threshold(std::span<const double> x, double alpha) {
  return static_cast<double>(alpha_threshold_ld(x, alpha));
}

Simplex alpha_policy_general(std::span<const double> q, double tau, double alpha) {
  check_q(q);
  const auto x = scaled(q, tau);
  const auto [lo, hi] = alpha_bracket(x, alpha);
  // The threshold is written as mu = anchor - delta with the anchor at the
  // smallest value in the support. For large alpha a coordinate a few ulps
  // above mu already carries visible mass, so delta is solved for directly
  // instead of being read off the difference of two nearby numbers.
  long double anchor = 0.5L * (lo + hi);
  long double delta = 0.0L;
  if (alpha > 1.0) {
    anchor = std::numeric_limits<long double>::infinity();
    for (double xi : x) {
      if (xi > lo) anchor = std::min(anchor, static_cast<long double>(xi));
    }
    auto excess = [&](long double d) {
      long double total = 0.0L;
      for (double xi : x) total += alpha_mass((alpha - 1.0L) * ((xi - anchor) + d), alpha);
      return total - 1.0L;
    };
    if (excess(0.0L) < 0.0L) {
      long double a = 0.0L, b = anchor - lo;
      for (int it = 0; it < 400; ++it) {
        const long double mid = 0.5L * (a + b);
        if (mid <= a || mid >= b) break;
        if (excess(mid) > 0.0L) {
          b = mid;
        } else {
          a = mid;
        }
      }
      delta = 0.5L * (a + b);
    }
  }
  std::vector<long double> mass(x.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mass[i] = alpha_mass((alpha - 1.0L) * ((x[i] - anchor) + delta), alpha);
    total += mass[i];
  }
  // What remains is rounding, removed by renormalizing. The mass function is
  // continuous, so a gross miss means the bracket was wrong.
  if (!std::isfinite(static_cast<double>(total)) || std::fabs(total - 1.0L) > 0.1L) {
    throw NumericError("alpha-divergence policy mass " + std::to_string(static_cast<double>(total)) +
                       " before normalization (alpha=" + std::to_string(alpha) + ")");
  }
  Simplex pi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pi[i] = static_cast<double>(mass[i] / total);
  return pi;
}

}  // namespace detail

// --- RegularizerKind --------------------------------------------------------------

RegularizerKind::RegularizerKind(Variant variant, double tau)
    : variant_(std::move(variant)), tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("regularizer temperature must be positive");
  }
  std::visit(Overloaded{
                 [](const reg::Relative& r) { check_prior(r.prior); },
                 [](const reg::AlphaDiv& a) { dispatch_alpha(a.alpha); },
                 [](const auto&) {},
             },
             variant_);
}

RegularizerKind RegularizerKind::relative_uniform(std::size_t n, double tau) {
  if (n == 0) throw std::invalid_argument("relative_uniform: no actions");
  return relative(Simplex(n, 1.0 / static_cast<double>(n)), tau);
}

RegularizerKind RegularizerKind::unchecked(Variant variant, double tau) {
  return RegularizerKind(Unchecked{}, std::move(variant), tau);
}

bool RegularizerKind::is_sparse() const {
  if (std::holds_alternative<reg::Tsallis>(variant_)) return true;
  if (const auto* a = std::get_if<reg::AlphaDiv>(&variant_)) return a->alpha > 1.0;
  return false;
}

RegularizerKind RegularizerKind::with_prior(Simplex prior) const {
  if (!is_relative()) return *this;
  RegularizerKind out = *this;
  std::get<reg::Relative>(out.variant_).prior = std::move(prior);
  return out;
}

// --- transforms -----------------------------------------------------------------

double value(const RegularizerKind& kind, std::span<const double> q) {
  check_q(q);
  const double tau = kind.tau();
  return std::visit(
      Overloaded{
          [&](const reg::Shannon&) { return log_sum_exp_value(q, tau, nullptr); },
          [&](const reg::Relative& r) {
            check_prior_size(r, q.size());
            return log_sum_exp_value(q, tau, &r.prior);
          },
          [&](const reg::Tsallis&) { return tsallis_value(q, tau); },
          [&](const reg::AlphaDiv& a) {
            if (a.alpha == 1.0) return log_sum_exp_value(q, tau, nullptr);
            if (a.alpha == 2.0) return tsallis_value(q, tau);
            const Simplex pi = detail::alpha_policy_general(q, tau, a.alpha);
            double inner = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) inner += pi[i] * q[i];
            return inner - tau * alpha_regularizer(pi, a.alpha);
          },
      },
      kind.variant());
}

Simplex policy(const RegularizerKind& kind, std::span<const double> q) {
  check_q(q);
  const double tau = kind.tau();
  return std::visit(
      Overloaded{
          [&](const reg::Shannon&) { return softmax_policy(q, tau, nullptr); },
          [&](const reg::Relative& r) {
            check_prior_size(r, q.size());
            return softmax_policy(q, tau, &r.prior);
          },
          [&](const reg::Tsallis&) { return tsallis_policy(q, tau); },
          [&](const reg::AlphaDiv& a) {
            if (a.alpha == 1.0) return softmax_policy(q, tau, nullptr);
            if (a.alpha == 2.0) return tsallis_policy(q, tau);
            return detail::alpha_policy_general(q, tau, a.alpha);
          },
      },
      kind.variant());
}

SparseSupport support(const RegularizerKind& kind, std::span<const double> q) {
  check_q(q);
  const double tau = kind.tau();
  const auto* alpha = std::get_if<reg::AlphaDiv>(&kind.variant());
  const bool tsallis = std::holds_alternative<reg::Tsallis>(kind.variant()) ||
                       (alpha != nullptr && alpha->alpha == 2.0);
  if (tsallis) {
    const double m = *std::max_element(q.begin(), q.end());
    std::vector<double> x(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) x[i] = (q[i] - m) / tau;
    return SparseSupport{sparsemax_support(x).support};
  }
  if (alpha == nullptr || alpha->alpha <= 1.0) {
    throw UsageError("support: only Tsallis and alpha > 1 policies are sparse");
  }
  const auto x = scaled(q, tau);
  const long double mu = alpha_threshold_ld(x, alpha->alpha);
  SparseSupport out;
  for (std::size_t a : descending_order(x)) {
    if (x[a] > mu) out.indices.push_back(a);
  }
  return out;
}

double regularizer_value(const RegularizerKind& kind, std::span<const double> pi) {
  if (pi.empty()) throw std::invalid_argument("regularizer_value: empty policy");
  auto shannon = [&] {
    double total = 0.0;
    for (double p : pi) {
      if (p > 0.0) total += p * std::log(p);
    }
    return total;
  };
  auto tsallis = [&] {
    double sq = 0.0;
    for (double p : pi) sq += p * p;
    return 0.5 * (sq - 1.0);
  };
  return std::visit(Overloaded{
                        [&](const reg::Shannon&) { return shannon(); },
                        [&](const reg::Relative& r) {
                          check_prior_size(r, pi.size());
                          double total = 0.0;
                          for (std::size_t i = 0; i < pi.size(); ++i) {
                            if (pi[i] > 0.0) total += pi[i] * std::log(pi[i] / r.prior[i]);
                          }
                          return total;
                        },
                        [&](const reg::Tsallis&) { return tsallis(); },
                        [&](const reg::AlphaDiv& a) {
                          if (a.alpha == 1.0) return shannon();
                          if (a.alpha == 2.0) return tsallis();
                          return alpha_regularizer(pi, a.alpha);
                        },
                    },
                    kind.variant());
}

RegularizerRange regularizer_range(const RegularizerKind& kind, std::size_t n) {
  if (n == 0) throw std::invalid_argument("regularizer_range: no actions");
  const double nd = static_cast<double>(n);
  const RegularizerRange shannon{-std::log(nd), 0.0};
  const RegularizerRange tsallis{-(nd - 1.0) / (2.0 * nd), 0.0};
  return std::visit(Overloaded{
                        [&](const reg::Shannon&) { return shannon; },
                        [&](const reg::Relative& r) {
                          check_prior_size(r, n);
                          const double m = *std::min_element(r.prior.begin(), r.prior.end());
                          return RegularizerRange{0.0, std::log(nd) + std::log(1.0 / m)};
                        },
                        [&](const reg::Tsallis&) { return tsallis; },
                        [&](const reg::AlphaDiv& a) {
                          if (a.alpha == 1.0) return shannon;
                          if (a.alpha == 2.0) return tsallis;
                          const double lower =
                              (std::pow(nd, 1.0 - a.alpha) - 1.0) / (a.alpha * (a.alpha - 1.0));
                          return RegularizerRange{lower, 0.0};
                        },
                    },
                    kind.variant());
}

}  // namespace mctslab
