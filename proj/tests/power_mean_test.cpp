#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mctslab/power_mean.hpp"
#include "oracles.hpp"

using namespace mctslab;

namespace {

double pm(const std::vector<double>& x, const std::vector<double>& w, double p) {
  return power_mean({x, w}, PowerExponent(p));
}

}  // namespace

TEST_CASE("power mean examples") {
  CHECK(pm({0.5}, {1.0}, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> x = {0.0, 1.0}, w = {1.0, 1.0};
  CHECK(power_mean({x, w}, PowerExponent::maximum()) == 1.0);
  CHECK(power_mean({x, w}, PowerExponent::minimum()) == 0.0);
  CHECK(std::abs(pm({0.2, 0.8}, {1.0, 3.0}, 2.0) - 0.7) < 1e-15);
}

TEST_CASE("power mean rejects invalid input") {
  const std::vector<double> empty;
  CHECK_THROWS_AS(power_mean({empty, empty}, PowerExponent(2.0)), std::domain_error);
  CHECK_THROWS_AS(pm({-0.5, 1.0}, {1.0, 1.0}, 1.5), std::domain_error);
  CHECK_THROWS_AS(pm({0.5, 1.0}, {1.0, 0.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(pm({0.5, 1.0}, {1.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(pm({0.5, 1.0}, {1.0, 1.0}, 1e-12), std::domain_error);
  CHECK(pm({-0.5, 1.0}, {1.0, 1.0}, 3.0) == doctest::Approx(std::cbrt(0.5 * (1.0 - 0.125))));
}

TEST_CASE("power mean matches a direct long double evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 12);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    const auto x = oracle::uniform_vec(rng, n, 0.0, 1.0);
    const auto w = oracle::uniform_vec(rng, n, 0.1, 2.0);
    for (double p : {1.0, 1.5, 2.2, 4.0, 8.0, 30.0}) {
      CHECK(pm(x, w, p) == doctest::Approx(oracle::power_mean(x, w, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("power mean properties on random instances") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(1, 12);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    const auto x = oracle::uniform_vec(rng, n, 0.0, 1.0);
    const auto w = oracle::uniform_vec(rng, n, 0.1, 2.0);
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    double prev = lo;
    for (double p : {1.0, 1.25, 2.0, 3.0, 7.0, 16.0, 64.0}) {
      const double m = pm(x, w, p);
      CHECK(m >= lo - 1e-12);
      CHECK(m <= hi + 1e-12);
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
    double sw = 0.0, swx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += w[i];
      swx += w[i] * x[i];
    }
    CHECK(std::abs(pm(x, w, 1.0) - swx / sw) <= 1e-12 * std::max(1.0, swx / sw));
    CHECK(weighted_mean({x, w}) == doctest::Approx(swx / sw).epsilon(1e-14));
  }
}

TEST_CASE("large exponent approaches the maximum") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 200; ++t) {
    const auto x = oracle::uniform_vec(rng, 8, 0.0, 1.0);
    const std::vector<double> w(8, 1.0);
    CHECK(pm(x, w, 64.0) >= *std::max_element(x.begin(), x.end()) - 0.05);
  }
}

TEST_CASE("large exponents stay finite for tiny and huge values") {
  CHECK(std::isfinite(pm({1e-200, 2e-200}, {1.0, 1.0}, 30.0)));
  CHECK(pm({1e-200, 2e-200}, {1.0, 1.0}, 30.0) > 1e-200);
  CHECK(pm({1e200, 2e200}, {1.0, 1.0}, 30.0) == doctest::Approx(2e200 * std::pow(0.5 + 0.5 * std::pow(0.5, 30.0), 1.0 / 30.0)));
}

TEST_CASE("gap constants: degenerate interval") {
  const BoundConstants c = mean_gap_bounds(1.0, 1.0, 2.0, 1.0);
  CHECK(c.H == 0.0);
  CHECK(c.L == doctest::Approx(1.0));
}

TEST_CASE("gap constants agree with a grid oracle") {
  const BoundConstants c = mean_gap_bounds(0.5, 1.0, 2.0, 1.0);
  CHECK(std::abs(c.H - oracle::grid_H(0.5, 1.0, 2.0, 1.0)) < 1e-8);
  CHECK(c.theta >= 0.0);
  CHECK(c.theta <= 1.0);
  for (auto [l, U, p, q] : {std::array<double, 4>{0.1, 1.0, 3.0, 1.0}, {0.2, 2.0, 4.0, 2.0}, {1e-6, 1.0, 2.0, 1.0},
                            {0.3, 0.9, 8.0, 1.5}}) {
    const BoundConstants k = mean_gap_bounds(l, U, p, q);
    CHECK(std::abs(k.H - oracle::grid_H(l, U, p, q)) < 1e-8);
    CHECK(k.H >= 0.0);
    // H is attained by the two-point distribution with mass theta on U.
    const double mp = std::pow(k.theta * std::pow(U, p) + (1 - k.theta) * std::pow(l, p), 1.0 / p);
    const double mq = std::pow(k.theta * std::pow(U, q) + (1 - k.theta) * std::pow(l, q), 1.0 / q);
    CHECK(mp - mq == doctest::Approx(k.H).epsilon(1e-9));
  }
}

TEST_CASE("gap constants reject invalid arguments") {
  CHECK_THROWS_AS(mean_gap_bounds(-0.1, 1.0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(mean_gap_bounds(0.5, 0.4, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(mean_gap_bounds(0.1, 1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(mean_gap_bounds(0.1, 1.0, 2.0, 0.5), std::domain_error);
  CHECK_NOTHROW(mean_gap_bounds(0.0, 1.0, 2.0, 1.0));
}

TEST_CASE("additive and ratio gap bounds hold on random instances") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> size(1, 10);
  std::uniform_real_distribution<double> pd(1.1, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    const auto x = oracle::uniform_vec(rng, n, 0.1, 1.0);
    const auto w = oracle::uniform_vec(rng, n, 0.1, 1.0);
    const double p = pd(rng);
    const BoundConstants c = mean_gap_bounds(0.1, 1.0, p, 1.0);
    CHECK(pm(x, w, p) - pm(x, w, 1.0) <= c.H + 1e-12);
    CHECK(pm(x, w, p) / pm(x, w, 1.0) <= c.L + 1e-12);
  }
}

TEST_CASE("tail bound") {
  // p = 1 is two-sided Hoeffding.
  for (std::size_t n : {1u, 10u, 100u}) {
    for (double eps : {0.05, 0.2}) {
      CHECK(power_mean_tail_bound(n, 1.0, eps, 0.0, 1.0) ==
            doctest::Approx(2.0 * std::exp(-2.0 * eps * eps * static_cast<double>(n))).epsilon(1e-14));
    }
  }
  const double h = mean_gap_bounds(0.0, 1.0, 2.0, 1.0).H;
  CHECK(power_mean_tail_bound(100, 2.0, 0.2, 0.0, 1.0) ==
        doctest::Approx(2.0 * std::exp(h) * std::exp(-8.0)).epsilon(1e-12));
  double prev = INFINITY;
  for (std::size_t n = 1; n < 200; n += 7) {
    const double b = power_mean_tail_bound(n, 2.0, 0.1, 0.0, 1.0);
    CHECK(b < prev);
    prev = b;
  }
}
