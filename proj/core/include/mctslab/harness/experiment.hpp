#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mctslab/envs/synthetic_tree.hpp"
#include "mctslab/harness/config.hpp"
#include "mctslab/tree.hpp"

namespace mctslab {

/// One point of a sweep: the base config with the swept keys set.
struct Variant {
  std::string label;
  Config config;
};

struct ExperimentConfig {
  Config base;
  std::vector<Variant> variants;
  std::vector<std::size_t> budgets;  // ascending
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output;
};

/// One (variant, run, budget) cell. Metrics that do not apply to the
/// environment are NaN.
struct ExperimentRecord {
  std::string variant;
  std::string config_hash;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  double ret = 0.0;
  bool success = false;
  double eps_omega = 0.0;
  double eps_uct = 0.0;
  double regret = 0.0;
  double wall_ms = 0.0;
};

/// Every key the harness understands (sweep.* keys are checked against this
/// set after the prefix is stripped).
const std::set<std::string>& known_config_keys();

/// Validates `cfg` and expands `sweep.<key> = v1, v2, ...` axes into the
/// cartesian product of variants, in key order. Throws ConfigError.
ExperimentConfig build_experiment(const Config& cfg);

/// Search parameters of a variant. `reward_range` resolves
/// `search.ucb.c = range` to max - min immediate reward.
SearchConfig search_config_from(const Config& cfg, std::size_t budget, const RewardRange& reward_range);

/// Seed of the cell (run, budget).
std::uint64_t cell_seed(std::uint64_t seed_base, std::size_t run, std::size_t budget);

/// Runs one cell. Deterministic in (variant config, seed_base, run, budget).
ExperimentRecord run_cell(const Variant& variant, std::uint64_t seed_base, std::size_t run, std::size_t budget);

/// The synthetic tree used by a run of a synthetic-tree experiment.
std::shared_ptr<const SyntheticTree> synthetic_tree_for_run(const Config& cfg, std::uint64_t seed_base,
                                                            std::size_t run);

}  // namespace mctslab
