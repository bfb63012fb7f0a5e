#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mctslab/errors.hpp"
#include "mctslab/oracle.hpp"
#include "mctslab/power_mean.hpp"
#include "oracles.hpp"

using namespace mctslab;

TEST_CASE("exact values on a two-leaf tree") {
  const SyntheticTree t(2, 1, 5);
  const ExactValues ex = exact_values(t);
  CHECK(ex.root() == 1.0);
  CHECK(ex.best_action == (t.leaf_mean(t.child(0, 1)) == 1.0 ? 1 : 0));
  const SyntheticTree noisy(2, 1, 5, 3.0);
  CHECK(exact_values(noisy).v == ex.v);
}

TEST_CASE("exact values match path enumeration") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SyntheticTree t(4, 3, seed);
    const ExactValues ex = exact_values(t);
    const auto leaves = oracle::leaf_means_from_edges(t.edge_values(), 4, 3);
    CHECK(ex.root() == doctest::Approx(oracle::max_over_paths(leaves, 4, 3)).epsilon(1e-14));
    for (int a = 0; a < 4; ++a) CHECK(ex.v[t.child(0, a)] <= ex.v[t.child(0, ex.best_action)]);
    for (std::size_t i = 0; i < leaves.size(); ++i) CHECK(ex.v[t.first_leaf() + i] == doctest::Approx(leaves[i]));
  }
}

TEST_CASE("regularized values") {
  const SyntheticTree t(3, 2, 11);
  const ExactValues ex = exact_values(t);
  CHECK(exact_regularized_values(t, RegularizerKind::shannon(1e-6)).root() ==
        doctest::Approx(ex.root()).epsilon(1e-4));

  // Tied children: Tsallis of [0, 0] at tau 1.
  const RegularizerKind ts = RegularizerKind::tsallis(1.0);
  const std::vector<double> zeros = {0.0, 0.0};
  CHECK(value(ts, zeros) == doctest::Approx(0.25).epsilon(1e-12));

  const std::vector<RegularizerKind> kinds = {RegularizerKind::shannon(0.3), RegularizerKind::relative_uniform(3, 0.3),
                                              RegularizerKind::tsallis(0.3), RegularizerKind::alpha_div(1.5, 0.3),
                                              RegularizerKind::alpha_div(4.0, 0.3)};
  for (const auto& kind : kinds) {
    const double vo = exact_regularized_values(t, kind).root();
    const RegularizerRange r = regularizer_range(kind, 3);
    // Each level shifts max q by -tau * Omega(pi) with Omega in [L, U].
    CHECK(vo >= ex.root() - 2.0 * kind.tau() * r.upper - 1e-9);
    CHECK(vo <= ex.root() - 2.0 * kind.tau() * r.lower + 1e-9);
  }

  double prev = std::numeric_limits<double>::infinity();
  for (double tau : {1.0, 0.1, 0.01, 0.001}) {
    const double v = exact_regularized_values(t, RegularizerKind::shannon(tau)).root();
    CHECK(v <= prev);
    CHECK(v >= ex.root());
    prev = v;
  }
  CHECK_THROWS_AS(exact_regularized_values(t, RegularizerKind::relative_uniform(2, 0.1)), UsageError);
}

TEST_CASE("entropic mean") {
  const std::vector<double> same = {0.4, 0.4, 0.4}, w3 = {0.2, 0.3, 0.5};
  CHECK(entropic_mean(same, w3, -1.0) == doctest::Approx(0.4).epsilon(1e-9));
  const std::vector<double> v = {0.2, 0.8}, w = {0.25, 0.75};
  CHECK(entropic_mean(v, w, -1.0) == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(entropic_mean(v, w, 0.0) == doctest::Approx(0.25 * 0.2 + 0.75 * 0.8).epsilon(1e-7));

  Rng rng(3);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(uniform_index(rng, 7));
    const auto x = oracle::uniform_vec(rng, n, 0.05, 1.0);
    const auto wt = oracle::random_simplex(rng, n);
    for (double p : {1.5, 2.0, 3.0}) {
      const double ref = static_cast<double>(oracle::power_mean(x, wt, p));
      worst = std::max(worst, std::abs(entropic_mean(x, wt, 1.0 - p) - ref));
    }
  }
  CHECK(worst < 1e-6);

  const std::vector<double> bad = {0.0, 1.0}, badw = {0.5, 0.6}, one = {1.0};
  CHECK_THROWS_AS(entropic_mean(bad, w, -1.0), std::domain_error);
  CHECK_THROWS_AS(entropic_mean(v, badw, -1.0), std::domain_error);
  CHECK_THROWS_AS(entropic_mean(v, one, -1.0), std::domain_error);
  CHECK(entropic_objective(v, w, 2.0, 0.7) <= entropic_objective(v, w, 2.0, 0.69));
  CHECK(entropic_objective(v, w, 2.0, 0.7) <= entropic_objective(v, w, 2.0, 0.71));
}

TEST_CASE("regret and value errors") {
  const SyntheticTree t(2, 1, 5);
  const ExactValues ex = exact_values(t);
  SearchResult r;
  r.root_value = ex.root();
  r.root_choices.assign(100, ex.best_action);
  RootErrors e = regret_and_errors(r, 100, t, ex, nullptr);
  CHECK(e.regret == 0.0);
  CHECK(e.eps_uct == 0.0);
  CHECK(e.eps_omega == 0.0);

  const ExactValues reg = exact_regularized_values(t, RegularizerKind::shannon(0.1));
  r.root_value = reg.root();
  e = regret_and_errors(r, 100, t, ex, &reg);
  CHECK(e.eps_omega == 0.0);
  CHECK(e.eps_uct == doctest::Approx(reg.root() - ex.root()));

  Rng rng(8);
  constexpr int n = 1000;
  r.root_choices.clear();
  for (int i = 0; i < n; ++i) r.root_choices.push_back(uniform_index(rng, 2));
  e = regret_and_errors(r, n, t, ex, nullptr);
  CHECK(std::abs(e.regret - 500.0) <= 4.0 * std::sqrt(n * 0.25));

  CHECK_THROWS_AS(regret_and_errors(r, n + 1, t, ex, nullptr), std::invalid_argument);
}
