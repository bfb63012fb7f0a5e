#include "mctslab/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "mctslab/envs/copy.hpp"
#include "mctslab/envs/frozen_lake.hpp"
#include "mctslab/envs/pocman.hpp"
#include "mctslab/envs/rocksample.hpp"
#include "mctslab/errors.hpp"
#include "mctslab/mcts.hpp"
#include "mctslab/oracle.hpp"
#include "mctslab/pomcp.hpp"

namespace mctslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kEnvStream = 0xE11;
constexpr std::uint64_t kTreeStream = 0x7EE;
constexpr std::uint64_t kBeliefStream = 0xBE1;

const std::vector<std::string> kEnvNames = {"synthetic", "frozenlake", "copy", "rocksample", "pocman"};

std::size_t positive_count(const Config& cfg, const std::string& key, std::int64_t fallback) {
  const auto v = cfg.get_int(key, fallback);
  if (v < 1) throw cfg.error(key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

int positive_int(const Config& cfg, const std::string& key, std::int64_t fallback) {
  const auto v = cfg.get_int(key, fallback);
  if (v < 1 || v > std::numeric_limits<int>::max()) throw cfg.error(key, "must be a positive integer");
  return static_cast<int>(v);
}

int nonneg_int(const Config& cfg, const std::string& key, std::int64_t fallback) {
  const auto v = cfg.get_int(key, fallback);
  if (v < 0 || v > std::numeric_limits<int>::max()) throw cfg.error(key, "must be a non-negative integer");
  return static_cast<int>(v);
}

std::string env_name(const Config& cfg) {
  const std::string name = cfg.get_string("env.name");
  if (std::find(kEnvNames.begin(), kEnvNames.end(), name) == kEnvNames.end()) {
    throw cfg.error("env.name", "unknown environment '" + name + "'");
  }
  return name;
}

std::vector<std::size_t> parse_budgets(const Config& cfg) {
  std::vector<std::size_t> out;
  for (const auto& item : cfg.get_list("search.budgets")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(item.c_str(), &end, 10);
    if (end != item.c_str() + item.size() || v < 1 || item.front() == '-') {
      throw cfg.error("search.budgets", "budget '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw cfg.error("search.budgets", "budgets must be strictly ascending");
  }
  return out;
}

RegularizerKind regularizer_from(const Config& cfg, int num_actions) {
  const double tau = cfg.get_double("search.e3w.tau", 0.1);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw cfg.error("search.e3w.tau", "must be positive and finite");
  const std::string name = cfg.get_string("search.e3w.regularizer", "shannon");
  if (name == "shannon") return RegularizerKind::shannon(tau);
  if (name == "relative") return RegularizerKind::relative_uniform(static_cast<std::size_t>(num_actions), tau);
  if (name == "tsallis") return RegularizerKind::tsallis(tau);
  if (name == "alpha") {
    const double alpha = cfg.get_double("search.e3w.alpha", 2.0);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw cfg.error("search.e3w.alpha", "must be positive and finite");
    return RegularizerKind::alpha_div(alpha, tau);
  }
  throw cfg.error("search.e3w.regularizer", "unknown regularizer '" + name + "'");
}

int env_actions(const Config& cfg) {
  const std::string name = env_name(cfg);
  if (name == "synthetic") return positive_int(cfg, "env.k", 2);
  if (name == "copy") return 4 * positive_int(cfg, "env.alphabet", 36);
  if (name == "rocksample") return nonneg_int(cfg, "env.k", 2) + 5;
  return 4;
}

SyntheticTree make_tree(const Config& cfg, std::uint64_t seed) {
  try {
    return SyntheticTree(positive_int(cfg, "env.k", 2), positive_int(cfg, "env.d", 1), seed,
                         cfg.get_double("env.sigma", SyntheticTree::kDefaultSigma));
  } catch (const std::invalid_argument& e) {
    throw cfg.error("env.k", e.what());
  }
}

RocksampleParams rocksample_params(const Config& cfg, std::uint64_t layout_seed) {
  RocksampleParams p;
  p.n = positive_int(cfg, "env.n", 4);
  p.k = nonneg_int(cfg, "env.k", 2);
  p.layout_seed = cfg.get_uint("env.layout_seed", layout_seed);
  p.good_reward = cfg.get_double("env.good_reward", 10.0);
  p.bad_reward = cfg.get_double("env.bad_reward", -10.0);
  p.exit_reward = cfg.get_double("env.exit_reward", 10.0);
  p.half_efficiency_distance = cfg.get_double("env.half_efficiency_distance", 20.0);
  p.max_steps = nonneg_int(cfg, "env.max_steps", 100);
  return p;
}

PocmanParams pocman_params(const Config& cfg) {
  PocmanParams p;
  p.num_ghosts = nonneg_int(cfg, "env.ghosts", 4);
  p.chase_prob = cfg.get_double("env.chase_prob", 0.75);
  p.ghost_range = nonneg_int(cfg, "env.ghost_range", 5);
  p.power_steps = nonneg_int(cfg, "env.power_steps", 15);
  p.food_prob = cfg.get_double("env.food_prob", 0.5);
  p.max_steps = nonneg_int(cfg, "env.max_steps", 100);
  return p;
}

struct Outcome {
  double ret = 0.0;
  bool success = false;
  double eps_omega = kNaN;
  double eps_uct = kNaN;
  double regret = kNaN;
};

double gamma_of(const Config& cfg) { return cfg.get_double("search.gamma", 0.95); }

Outcome run_synthetic(const Config& cfg, std::uint64_t seed_base, std::size_t run, std::size_t budget,
                      std::uint64_t seed) {
  const auto tree = synthetic_tree_for_run(cfg, seed_base, run);
  SyntheticTreeEnv env(tree);
  SearchConfig sc = search_config_from(cfg, budget, env.reward_range());
  sc.rng_seed = derive_seed(seed, {0});
  const SearchResult res = search(env, sc);
  const ExactValues exact = exact_values(*tree);
  Outcome out;
  std::unique_ptr<ExactValues> reg;
  // The relative-entropy prior tracks the previous policy, whose fixed point
  // is the greedy one, so its regularized target is V* itself.
  if (const auto* e3w = std::get_if<E3w>(&sc.tree_policy); e3w && !e3w->kind.is_relative()) {
    reg = std::make_unique<ExactValues>(exact_regularized_values(*tree, e3w->kind));
  }
  const RootErrors err = regret_and_errors(res, budget, *tree, exact, reg.get());
  out.eps_omega = err.eps_omega;
  out.eps_uct = err.eps_uct;
  out.regret = err.regret;
  out.ret = exact.v[tree->child(0, res.recommended_action)];
  out.success = res.recommended_action == exact.best_action;
  return out;
}

Outcome run_frozenlake(const Config& cfg, std::uint64_t seed_base, std::size_t run, std::size_t budget,
                       std::uint64_t seed) {
  FrozenLake env(FrozenLake::canonical_map(), positive_int(cfg, "env.step_limit", FrozenLake::kDefaultStepLimit));
  Rng env_rng(derive_seed(seed_base, {kEnvStream, run}));
  SearchConfig sc = search_config_from(cfg, budget, env.reward_range());
  const double gamma = gamma_of(cfg);
  Outcome out;
  double discount = 1.0;
  for (std::uint64_t t = 0; !env.done(); ++t) {
    sc.rng_seed = derive_seed(seed, {t});
    const SearchResult res = search(env, sc);
    const StepResult r = env.step(res.recommended_action, env_rng);
    out.ret += discount * r.reward;
    discount *= gamma;
  }
  out.success = env.at_goal();
  return out;
}

Outcome run_copy(const Config& cfg, std::uint64_t seed_base, std::size_t run, std::size_t budget,
                 std::uint64_t seed) {
  CopyEnv env(positive_int(cfg, "env.alphabet", 36), derive_seed(seed_base, {kEnvStream, run}),
              positive_int(cfg, "env.band_length", CopyEnv::kDefaultBandLength),
              positive_int(cfg, "env.time_limit", CopyEnv::kDefaultTimeLimit));
  SearchConfig sc = search_config_from(cfg, budget, env.reward_range());
  sc.rng_seed = derive_seed(seed, {0});
  const SearchTree tree = build_tree(env, sc);
  Rng rng(derive_seed(seed, {1}));
  const double gamma = gamma_of(cfg);
  Outcome out;
  double discount = 1.0;
  NodeId node = 0;
  while (!env.done()) {
    const bool on_tree = node != kNoNode && tree.node(node).N > 0;
    const int a = on_tree ? tree.recommend(node) : uniform_index(rng, env.num_actions());
    const StepResult r = env.step(a, rng);
    out.ret += discount * r.reward;
    discount *= gamma;
    node = on_tree ? tree.child(node, a, env.state_key()) : kNoNode;
  }
  out.success = env.written() == env.band_length();
  return out;
}

Outcome run_pomdp(const Config& cfg, std::uint64_t seed_base, std::size_t run, std::size_t budget,
                  std::uint64_t seed, bool rocksample) {
  Rng env_rng(derive_seed(seed_base, {kEnvStream, run}));
  std::unique_ptr<PomdpEnvironment> env;
  if (rocksample) {
    env = std::make_unique<RocksampleEnv>(rocksample_params(cfg, derive_seed(seed_base, {kTreeStream})), env_rng);
  } else {
    env = std::make_unique<PocmanEnv>(pocman_params(cfg), env_rng);
  }
  const std::size_t particles = positive_count(cfg, "belief.particles", static_cast<std::int64_t>(kDefaultParticles));
  const std::size_t attempts =
      positive_count(cfg, "belief.max_attempts", static_cast<std::int64_t>(kDefaultMaxAttempts));
  Rng belief_rng(derive_seed(seed, {kBeliefStream}));
  Belief belief = initial_belief(*env, particles, belief_rng);
  std::vector<std::pair<int, std::uint64_t>> history;
  SearchConfig sc = search_config_from(cfg, budget, env->reward_range());
  const double gamma = gamma_of(cfg);
  Outcome out;
  double discount = 1.0;
  for (std::uint64_t t = 0; !env->done(); ++t) {
    sc.rng_seed = derive_seed(seed, {t});
    const SearchResult res = pomcp_search(belief, sc);
    const PomdpStepResult r = env->step(res.recommended_action, env_rng);
    out.ret += discount * r.reward;
    discount *= gamma;
    if (r.done) break;
    history.emplace_back(res.recommended_action, r.observation);
    try {
      belief = belief_update(belief, res.recommended_action, r.observation, belief_rng, particles, attempts);
    } catch (const BeliefCollapse&) {
      try {
        belief = rebuild_belief(*env, history, belief_rng, particles, attempts).first;
      } catch (const BeliefCollapse&) {
        belief = initial_belief(*env, particles, belief_rng);
      }
    }
  }
  out.success = out.ret > 0.0;
  return out;
}

}  // namespace

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "env.name", "env.k", "env.d", "env.sigma", "env.trees", "env.step_limit", "env.alphabet",
      "env.band_length", "env.time_limit", "env.n", "env.layout_seed", "env.good_reward", "env.bad_reward",
      "env.exit_reward", "env.half_efficiency_distance", "env.max_steps", "env.ghosts", "env.chase_prob",
      "env.ghost_range", "env.power_steps", "env.food_prob", "belief.particles", "belief.max_attempts",
      "search.budgets", "search.backup", "search.backup.p", "search.policy", "search.ucb.c",
      "search.e3w.regularizer", "search.e3w.tau", "search.e3w.epsilon", "search.e3w.alpha", "search.gamma",
      "search.rollout_depth", "search.recommend", "run.count", "run.seed", "run.workers", "output.path",
  };
  return keys;
}

std::uint64_t cell_seed(std::uint64_t seed_base, std::size_t run, std::size_t budget) {
  return derive_seed(seed_base, {run, budget});
}

SearchConfig search_config_from(const Config& cfg, std::size_t budget, const RewardRange& reward_range) {
  SearchConfig sc;
  sc.n_simulations = budget;
  const std::string backup = cfg.get_string("search.backup", "average");
  if (backup == "average") {
    sc.backup = Backup::average();
  } else if (backup == "max") {
    sc.backup = Backup::max();
  } else if (backup == "power") {
    const double p = cfg.get_double("search.backup.p", 1.0);
    if (!(p >= 1.0)) throw cfg.error("search.backup.p", "power backup requires p >= 1");
    sc.backup = std::isinf(p) ? Backup::max() : Backup::power(p);
  } else {
    throw cfg.error("search.backup", "expected average, power or max");
  }
  const std::string policy = cfg.get_string("search.policy", "ucb1");
  if (policy == "ucb1") {
    double c = 1.4142135623730951;
    if (cfg.has("search.ucb.c")) {
      c = cfg.get_string("search.ucb.c") == "range" ? reward_range.max - reward_range.min
                                                     : cfg.get_double("search.ucb.c");
    }
    if (!(c >= 0.0) || !std::isfinite(c)) throw cfg.error("search.ucb.c", "must be finite and >= 0");
    sc.tree_policy = Ucb1{c};
  } else if (policy == "e3w") {
    const double eps = cfg.get_double("search.e3w.epsilon", 0.1);
    if (!(eps > 0.0) || !std::isfinite(eps)) throw cfg.error("search.e3w.epsilon", "must be > 0");
    sc.tree_policy = E3w{regularizer_from(cfg, env_actions(cfg)), eps};
  } else {
    throw cfg.error("search.policy", "expected ucb1 or e3w");
  }
  sc.gamma = cfg.get_double("search.gamma", 0.95);
  if (!(sc.gamma >= 0.0 && sc.gamma <= 1.0)) throw cfg.error("search.gamma", "must lie in [0, 1]");
  sc.rollout_depth_limit = positive_int(cfg, "search.rollout_depth", 100);
  const std::string rec = cfg.get_string("search.recommend", "default");
  if (rec == "max_visit") {
    sc.recommend = Recommend::kMaxVisit;
  } else if (rec == "max_value") {
    sc.recommend = Recommend::kMaxValue;
  } else if (rec != "default") {
    throw cfg.error("search.recommend", "expected max_visit, max_value or default");
  }
  return sc;
}

ExperimentConfig build_experiment(const Config& cfg) {
  cfg.require_known(known_config_keys(), {"sweep."});
  ExperimentConfig ex;
  ex.base = cfg;
  ex.budgets = parse_budgets(cfg);
  ex.runs = positive_count(cfg, "run.count", 1);
  ex.seed = cfg.get_uint("run.seed", 0);
  ex.workers = positive_int(cfg, "run.workers", 1);
  ex.output = cfg.get_string("output.path", "results.csv");

  Config base = cfg;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& key : cfg.keys_with_prefix("sweep.")) {
    const std::string target = key.substr(6);
    if (!known_config_keys().count(target) || target.rfind("run.", 0) == 0 || target.rfind("output.", 0) == 0 ||
        target == "search.budgets") {
      throw cfg.error(key, "cannot sweep '" + target + "'");
    }
    if (cfg.has(target)) throw cfg.error(key, "'" + target + "' is both set and swept");
    axes.emplace_back(target, cfg.get_list(key));
    base.erase(key);
  }
  std::vector<Variant> variants{{"base", base}};
  if (!axes.empty()) variants.front().label.clear();
  for (const auto& [key, values] : axes) {
    std::vector<Variant> next;
    for (const Variant& v : variants) {
      for (const auto& value : values) {
        Variant n = v;
        n.config.set(key, value);
        n.label += (n.label.empty() ? "" : ";") + key + "=" + value;
        next.push_back(std::move(n));
      }
    }
    variants = std::move(next);
  }
  for (Variant& v : variants) {
    env_name(v.config);
    const RewardRange nominal{};
    search_config_from(v.config, ex.budgets.front(), nominal).validate();
    if (v.config.get_string("env.name") == "synthetic") make_tree(v.config, 0);
    if (v.config.get_string("env.name") == "rocksample") {
      try {
        RocksampleEnv probe(rocksample_params(v.config, 0), std::uint64_t{0});
      } catch (const std::invalid_argument& e) {
        throw v.config.error("env.k", e.what());
      }
    }
    if (v.config.get_string("env.name") == "pocman") {
      try {
        Rng probe_rng(0);
        PocmanEnv probe(pocman_params(v.config), probe_rng);
      } catch (const std::invalid_argument& e) {
        throw v.config.error("env.ghosts", e.what());
      }
    }
  }
  ex.variants = std::move(variants);
  return ex;
}

std::shared_ptr<const SyntheticTree> synthetic_tree_for_run(const Config& cfg, std::uint64_t seed_base,
                                                            std::size_t run) {
  const std::size_t trees = positive_count(cfg, "env.trees", 5);
  const std::uint64_t seed = derive_seed(seed_base, {kTreeStream, run % trees});
  using Key = std::tuple<std::int64_t, std::int64_t, double, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const SyntheticTree>> cache;
  const Key key{cfg.get_int("env.k", 2), cfg.get_int("env.d", 1),
                cfg.get_double("env.sigma", SyntheticTree::kDefaultSigma), seed};
  {
    std::lock_guard lock(mu);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto tree = std::make_shared<const SyntheticTree>(make_tree(cfg, seed));
  std::lock_guard lock(mu);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, std::move(tree)).first->second;
}

ExperimentRecord run_cell(const Variant& variant, std::uint64_t seed_base, std::size_t run, std::size_t budget) {
  const Config& cfg = variant.config;
  ExperimentRecord rec;
  rec.variant = variant.label;
  Config hashed = cfg;
  hashed.erase("output.path");
  hashed.erase("run.workers");
  rec.config_hash = hashed.hash_hex();
  rec.run = run;
  rec.budget = budget;
  rec.seed = cell_seed(seed_base, run, budget);
  const auto start = std::chrono::steady_clock::now();
  const std::string name = env_name(cfg);
  Outcome out;
  if (name == "synthetic") {
    out = run_synthetic(cfg, seed_base, run, budget, rec.seed);
  } else if (name == "frozenlake") {
    out = run_frozenlake(cfg, seed_base, run, budget, rec.seed);
  } else if (name == "copy") {
    out = run_copy(cfg, seed_base, run, budget, rec.seed);
  } else {
    out = run_pomdp(cfg, seed_base, run, budget, rec.seed, name == "rocksample");
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rec.ret = out.ret;
  rec.success = out.success;
  rec.eps_omega = out.eps_omega;
  rec.eps_uct = out.eps_uct;
  rec.regret = out.regret;
  return rec;
}

}  // namespace mctslab
