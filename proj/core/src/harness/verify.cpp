#include "mctslab/harness/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "json.hpp"
#include "mctslab/envs/synthetic_tree.hpp"
#include "mctslab/harness/config.hpp"
#include "mctslab/mcts.hpp"
#include "mctslab/oracle.hpp"
#include "mctslab/power_mean.hpp"
#include "mctslab/regularizer.hpp"
#include "mctslab/rng.hpp"
#include "mctslab/stats.hpp"

namespace mctslab {

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<double> uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (double& x : v) total += (x = exp1(rng) + 1e-12);
  for (double& x : v) x /= total;
  return v;
}

Assertion counted(std::string name, std::size_t violations, std::size_t total, std::string what) {
  Assertion a;
  a.name = std::move(name);
  a.observed = static_cast<double>(violations);
  a.threshold = 0.0;
  a.passed = violations == 0;
  a.detail = std::to_string(violations) + " of " + std::to_string(total) + " " + what;
  return a;
}

Assertion bounded(std::string name, double observed, double threshold, std::string detail) {
  Assertion a;
  a.name = std::move(name);
  a.observed = observed;
  a.threshold = threshold;
  a.passed = observed <= threshold;
  a.detail = std::move(detail);
  return a;
}

// ----------------------------------------------------------------------------- kernels

const std::vector<double> kExponents = {1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0};

}  // namespace

VerifyReport verify_kernels(const VerifyOptions& options) {
  VerifyReport report{"kernels", {}};
  Rng rng(derive_seed(options.seed, {1}));
  constexpr std::size_t kInstances = 1000;
  std::size_t bound_bad = 0, mono_bad = 0, mean_bad = 0, additive_bad = 0, ratio_bad = 0;
  double mean_err = 0.0;
  for (std::size_t i = 0; i < kInstances; ++i) {
    const auto n = static_cast<std::size_t>(1 + uniform_index(rng, 20));
    const auto x = uniform_vector(rng, n, 0.0, 1.0);
    const auto w = uniform_vector(rng, n, 0.1, 1.0);
    const WeightedValues data{x, w};
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    double prev = -1.0;
    for (double p : kExponents) {
      const double m = power_mean(data, PowerExponent(p));
      if (m < lo - 1e-12 || m > hi + 1e-12) ++bound_bad;
      if (m < prev - 1e-12) ++mono_bad;
      prev = m;
    }
    const double mx = power_mean(data, PowerExponent::maximum());
    if (mx != hi || mx < prev - 1e-12) ++mono_bad;
    double sw = 0.0, swx = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sw += w[j];
      swx += w[j] * x[j];
    }
    const double err = std::abs(power_mean(data, PowerExponent(1.0)) - swx / sw);
    mean_err = std::max(mean_err, err);
    if (err > 1e-12) ++mean_bad;

    // Additive and ratio gap bounds on [0.1, 1].
    const auto y = uniform_vector(rng, n, 0.1, 1.0);
    const double q = uniform(rng, 1.0, 3.0);
    const double p = q + uniform(rng, 0.1, 8.0);
    const BoundConstants c = mean_gap_bounds(0.1, 1.0, p, q);
    const WeightedValues yd{y, w};
    const double mp = power_mean(yd, PowerExponent(p));
    const double mq = power_mean(yd, PowerExponent(q));
    if (mp - mq > c.H + 1e-12) ++additive_bad;
    if (mp / mq > c.L + 1e-12) ++ratio_bad;
  }
  report.assertions.push_back(counted("power_mean_within_min_max", bound_bad, kInstances * kExponents.size(),
                                      "means outside [min, max]"));
  report.assertions.push_back(counted("power_mean_monotone_in_p", mono_bad, kInstances, "instances non-monotone"));
  auto eq = counted("p1_equals_weighted_mean", mean_bad, kInstances, "instances differ by more than 1e-12");
  eq.detail += "; max error " + format_double(mean_err);
  report.assertions.push_back(eq);
  report.assertions.push_back(counted("additive_gap_bound", additive_bad, kInstances, "instances exceed H_{p,q}"));
  report.assertions.push_back(counted("ratio_gap_bound", ratio_bad, kInstances, "instances exceed L_{p,q}"));
  return report;
}

// ----------------------------------------------------------------------------- regularizers

namespace {

struct KindCase {
  std::string name;
  std::function<RegularizerKind(std::size_t n, double tau, Rng&)> make;
};

std::vector<KindCase> kind_cases() {
  return {
      {"shannon", [](std::size_t, double tau, Rng&) { return RegularizerKind::unchecked(reg::Shannon{}, tau); }},
      {"relative",
       [](std::size_t n, double tau, Rng& rng) {
         return RegularizerKind::unchecked(reg::Relative{random_simplex(rng, n)}, tau);
       }},
      {"tsallis", [](std::size_t, double tau, Rng&) { return RegularizerKind::unchecked(reg::Tsallis{}, tau); }},
      {"alpha_0.5",
       [](std::size_t, double tau, Rng&) { return RegularizerKind::unchecked(reg::AlphaDiv{0.5}, tau); }},
      {"alpha_1.5",
       [](std::size_t, double tau, Rng&) { return RegularizerKind::unchecked(reg::AlphaDiv{1.5}, tau); }},
      {"alpha_3", [](std::size_t, double tau, Rng&) { return RegularizerKind::unchecked(reg::AlphaDiv{3.0}, tau); }},
  };
}

// Gradient of Omega at pi; infinite where Omega is not differentiable.
std::vector<double> omega_gradient(const RegularizerKind& kind, std::span<const double> pi) {
  std::vector<double> g(pi.size());
  const auto& v = kind.variant();
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (std::holds_alternative<reg::Shannon>(v)) {
      g[i] = std::log(pi[i]) + 1.0;
    } else if (const auto* r = std::get_if<reg::Relative>(&v)) {
      g[i] = std::log(pi[i] / r->prior[i]) + 1.0;
    } else if (std::holds_alternative<reg::Tsallis>(v)) {
      g[i] = pi[i];
    } else {
      const double a = std::get<reg::AlphaDiv>(v).alpha;
      g[i] = std::pow(pi[i], a - 1.0) / (a - 1.0);
    }
  }
  return g;
}

double objective(const RegularizerKind& kind, std::span<const double> q, std::span<const double> pi) {
  double inner = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) inner += pi[i] * q[i];
  return inner - kind.tau() * regularizer_value(kind, pi);
}

}  // namespace

VerifyReport verify_regularizers(const VerifyOptions& options) {
  VerifyReport report{"regularizers", {}};
  Rng rng(derive_seed(options.seed, {2}));
  const auto cases = kind_cases();

  for (const auto& kc : cases) {
    double grad_err = 0.0, opt_err = 0.0, fw_gap = 0.0, beat = 0.0;
    std::size_t bound_bad = 0, range_bad = 0, failures = 0;
    std::string first_failure;
    constexpr std::size_t kVectors = 200;
    for (std::size_t t = 0; t < kVectors; ++t) {
      const auto n = static_cast<std::size_t>(2 + uniform_index(rng, 7));
      const double tau = options.fault_tau.value_or(uniform(rng, 0.5, 2.0));
      const auto q = uniform_vector(rng, n, -1.0, 1.0);
      const RegularizerKind kind = kc.make(n, tau, rng);
      try {
        const double v = value(kind, q);
        const Simplex pi = policy(kind, q);
        constexpr double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
          auto qp = q, qm = q;
          qp[i] += h;
          qm[i] -= h;
          const double fd = (value(kind, qp) - value(kind, qm)) / (2.0 * h);
          grad_err = std::max(grad_err, std::abs(fd - pi[i]));
        }
        opt_err = std::max(opt_err, std::abs(v - objective(kind, q, pi)));
        const auto g_omega = omega_gradient(kind, pi);
        double max_g = -INFINITY, avg_g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double g = q[i] - tau * g_omega[i];
          max_g = std::max(max_g, g);
          avg_g += pi[i] * g;
        }
        fw_gap = std::max(fw_gap, max_g - avg_g);
        for (int s = 0; s < 20; ++s) {
          const auto other = random_simplex(rng, n);
          beat = std::max(beat, objective(kind, q, other) - v);
        }
        const auto range = regularizer_range(kind, n);
        const double qmax = *std::max_element(q.begin(), q.end());
        if (v < qmax - tau * range.upper - 1e-9 || v > qmax - tau * range.lower + 1e-9) ++bound_bad;
        const double om = regularizer_value(kind, pi);
        if (om < range.lower - 1e-9 || om > range.upper + 1e-9) ++range_bad;
      } catch (const std::exception& e) {
        if (failures++ == 0) first_failure = e.what();
      }
    }
    const std::string k = kc.name;
    auto err = counted(k + ".no_exceptions", failures, kVectors, "vectors threw");
    if (failures) err.detail += "; first: " + first_failure;
    report.assertions.push_back(err);
    report.assertions.push_back(bounded(k + ".gradient_matches_policy", grad_err, 1e-5,
                                        "max |finite difference - policy| over 200 vectors"));
    report.assertions.push_back(bounded(k + ".value_is_objective_at_policy", opt_err, 1e-9,
                                        "max |value - (<pi,q> - tau Omega(pi))|"));
    report.assertions.push_back(bounded(k + ".optimality_gap", fw_gap, 1e-9, "max Frank-Wolfe duality gap at policy"));
    report.assertions.push_back(bounded(k + ".no_better_simplex_point", beat, 1e-9,
                                        "max objective excess of random simplex points"));
    report.assertions.push_back(counted(k + ".value_bounded", bound_bad, kVectors,
                                        "values outside [max q - tau U, max q - tau L]"));
    report.assertions.push_back(counted(k + ".omega_in_range", range_bad, kVectors, "policies with Omega outside [L, U]"));
  }

  double pol_err = 0.0, val_err = 0.0;
  std::size_t alpha_failures = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(2 + uniform_index(rng, 9));
    const double tau = options.fault_tau.value_or(uniform(rng, 0.05, 2.0));
    const auto q = uniform_vector(rng, n, -2.0, 2.0);
    try {
      const auto ts = RegularizerKind::unchecked(reg::Tsallis{}, tau);
      const Simplex a = detail::alpha_policy_general(q, tau, 2.0);
      const Simplex b = policy(ts, q);
      for (std::size_t i = 0; i < n; ++i) pol_err = std::max(pol_err, std::abs(a[i] - b[i]));
      val_err = std::max(val_err, std::abs(objective(ts, q, a) - value(ts, q)));
    } catch (const std::exception&) {
      ++alpha_failures;
    }
  }
  report.assertions.push_back(counted("alpha2_no_exceptions", alpha_failures, 1000, "vectors threw"));
  report.assertions.push_back(bounded("alpha2_policy_equals_tsallis", pol_err, 1e-12,
                                      "max |threshold-search policy - sparsemax| over 1000 vectors"));
  report.assertions.push_back(bounded("alpha2_value_equals_tsallis", val_err, 1e-12,
                                      "max |threshold-search value - spmax value| over 1000 vectors"));

  try {
    const double tau = options.fault_tau.value_or(1.0);
    const std::vector<double> zeros = {0.0, 0.0};
    const double v = value(RegularizerKind::unchecked(reg::Tsallis{}, tau), zeros);
    report.assertions.push_back(bounded("tsallis_two_ties_value", std::abs(v - 0.25), 1e-12, "value([0,0]) vs 0.25"));
  } catch (const std::exception& e) {
    report.assertions.push_back({"tsallis_two_ties_value", false, NAN, 1e-12, e.what()});
  }
  return report;
}

// ----------------------------------------------------------------------------- concentration

VerifyReport verify_concentration(const VerifyOptions& options) {
  VerifyReport report{"concentration", {}};
  const std::vector<double> ps = {1.0, 2.0, 4.0};
  const std::vector<std::size_t> ns = {10, 100};
  std::vector<double> eps;
  for (int i = 1; i <= 8; ++i) eps.push_back(0.05 * i);
  const std::size_t trials = options.mc_trials;
  double worst_ratio = 0.0;
  std::string worst;
  for (double p : ps) {
    for (std::size_t n : ns) {
      Rng rng(derive_seed(options.seed, {3, static_cast<std::uint64_t>(p * 10), n}));
      std::vector<std::uint64_t> exceed(eps.size(), 0);
      std::vector<double> xs(n);
      for (std::size_t t = 0; t < trials; ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::pow(uniform01(rng), p);
        const double m = std::pow(s / static_cast<double>(n), 1.0 / p);
        const double dev = std::abs(m - 0.5);
        for (std::size_t e = 0; e < eps.size(); ++e) exceed[e] += dev > eps[e];
      }
      for (std::size_t e = 0; e < eps.size(); ++e) {
        const double bound = power_mean_tail_bound(n, p, eps[e], 0.0, 1.0);
        const double tail = static_cast<double>(exceed[e]) / static_cast<double>(trials);
        const double lower = stats::binomial_lower_bound(exceed[e], trials, 0.99);
        const double ratio = tail / bound;
        const std::string name = "tail_p" + format_double(p) + "_n" + std::to_string(n) + "_eps" + format_double(eps[e]);
        Assertion a;
        a.name = name;
        a.observed = lower;
        a.threshold = bound;
        a.passed = lower <= bound;
        a.detail = "empirical tail " + format_double(tail) + " (99% lower " + format_double(lower) + ") vs bound " +
                   format_double(bound);
        report.assertions.push_back(a);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          worst = name;
        }
      }
    }
  }
  report.assertions.push_back(bounded("max_tail_to_bound_ratio", worst_ratio, 1.0, "attained at " + worst));
  return report;
}

// ----------------------------------------------------------------------------- oracle equivalence

VerifyReport verify_oracle_equivalence(const VerifyOptions& options) {
  VerifyReport report{"oracle-equivalence", {}};
  Rng rng(derive_seed(options.seed, {4}));
  for (double p : {1.5, 2.0, 3.0}) {
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const auto n = static_cast<std::size_t>(1 + uniform_index(rng, 8));
      const auto x = uniform_vector(rng, n, 0.05, 1.0);
      const auto w = random_simplex(rng, n);
      const double e = entropic_mean(x, w, 1.0 - p);
      const double m = power_mean({x, w}, PowerExponent(p));
      worst = std::max(worst, std::abs(e - m));
    }
    report.assertions.push_back(bounded("entropic_equals_power_p" + format_double(p), worst, 1e-6,
                                        "max |entropic mean - power mean| over 500 instances"));
  }
  {
    const std::vector<double> x = {0.2, 0.8}, w = {0.25, 0.75};
    report.assertions.push_back(
        bounded("entropic_example", std::abs(entropic_mean(x, w, -1.0) - 0.7), 1e-6, "[0.2,0.8] w [0.25,0.75] p=2"));
  }

  // Backward induction against path enumeration.
  {
    std::size_t bad = 0;
    for (int t = 0; t < 20; ++t) {
      const SyntheticTree tree(4, 3, derive_seed(options.seed, {5, static_cast<std::uint64_t>(t)}));
      double best = -1.0;
      for (std::size_t leaf = tree.first_leaf(); leaf < tree.num_nodes(); ++leaf) {
        best = std::max(best, tree.leaf_mean(leaf));
      }
      if (exact_values(tree).root() != best) ++bad;
    }
    report.assertions.push_back(counted("exact_values_match_enumeration", bad, 20, "k=4,d=3 trees differ"));
  }

  // UCT with average backup converges to V*.
  const std::vector<std::pair<int, int>> shapes = {{2, 1}, {4, 1}, {2, 2}, {4, 2}};
  for (const auto& [k, d] : shapes) {
    std::size_t within = 0;
    double worst = 0.0;
    for (std::size_t run = 0; run < options.mcts_runs; ++run) {
      const std::uint64_t seed = derive_seed(options.seed, {6, static_cast<std::uint64_t>(k),
                                                            static_cast<std::uint64_t>(d), run});
      auto tree = std::make_shared<const SyntheticTree>(k, d, seed);
      SyntheticTreeEnv env(tree);
      SearchConfig sc;
      sc.n_simulations = options.mcts_simulations;
      sc.backup = Backup::average();
      sc.tree_policy = Ucb1{std::sqrt(2.0)};
      sc.gamma = 1.0;
      sc.rng_seed = derive_seed(seed, {1});
      const double err = std::abs(search(env, sc).root_value - exact_values(*tree).root());
      worst = std::max(worst, err);
      within += err <= 0.02;
    }
    const std::size_t needed = options.mcts_runs - options.mcts_runs / 25;
    Assertion a;
    a.name = "uct_converges_k" + std::to_string(k) + "_d" + std::to_string(d);
    a.observed = static_cast<double>(within);
    a.threshold = static_cast<double>(needed);
    a.passed = within >= needed;
    a.detail = std::to_string(within) + "/" + std::to_string(options.mcts_runs) + " runs within 0.02 of V*; worst " +
               format_double(worst);
    report.assertions.push_back(a);
  }
  return report;
}

// ----------------------------------------------------------------------------- dispatch

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"kernels", "regularizers", "concentration", "oracle-equivalence"};
  return names;
}

VerifyReport verify_suite(const std::string& suite, const VerifyOptions& options) {
  if (suite == "kernels") return verify_kernels(options);
  if (suite == "regularizers") return verify_regularizers(options);
  if (suite == "concentration") return verify_concentration(options);
  if (suite == "oracle-equivalence") return verify_oracle_equivalence(options);
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

bool VerifyReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["passed"] = passed();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& a : assertions) {
    nlohmann::ordered_json e;
    e["name"] = a.name;
    e["passed"] = a.passed;
    e["observed"] = std::isfinite(a.observed) ? nlohmann::ordered_json(a.observed) : nlohmann::ordered_json(format_double(a.observed));
    e["threshold"] = a.threshold;
    e["detail"] = a.detail;
    arr.push_back(e);
  }
  j["assertions"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace mctslab
