#include "mctslab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "mctslab/rng.hpp"

namespace mctslab::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double std_err(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("std_err of empty sample");
  return stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

double bootstrap_diff_lower(std::span<const double> a, std::span<const double> b, double confidence,
                            std::size_t resamples, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("bootstrap of empty sample");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  Rng rng(seed);
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  std::vector<double> diffs(resamples);
  for (double& d : diffs) {
    double sa = 0.0;
    double sb = 0.0;
    for (int i = 0; i < na; ++i) sa += a[static_cast<std::size_t>(uniform_index(rng, na))];
    for (int i = 0; i < nb; ++i) sb += b[static_cast<std::size_t>(uniform_index(rng, nb))];
    d = sa / na - sb / nb;
  }
  std::sort(diffs.begin(), diffs.end());
  const auto idx = static_cast<std::size_t>(std::floor((1.0 - confidence) * static_cast<double>(resamples)));
  return diffs[std::min(idx, resamples - 1)];
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test of empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    const double fx = static_cast<double>(i) / static_cast<double>(x.size());
    const double fy = static_cast<double>(j) / static_cast<double>(y.size());
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

double ks_pvalue(std::span<const double> a, std::span<const double> b) {
  const double d = ks_statistic(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  if (lambda < 1e-3) return 1.0;
  // Kolmogorov tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument("chi-square: size mismatch");
  }
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] != 0.0) return 0.0;
      continue;
    }
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++cells;
  }
  if (cells < 2) return 1.0;
  const boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double binomial_lower_bound(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("binomial bound with no trials");
  if (successes == 0) return 0.0;
  return boost::math::binomial_distribution<>::find_lower_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), 1.0 - confidence);
}

}  // namespace mctslab::stats
