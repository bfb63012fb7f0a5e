#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mctslab/environment.hpp"
#include "mctslab/power_mean.hpp"
#include "mctslab/regularizer.hpp"
#include "mctslab/rng.hpp"

namespace mctslab {

/// V-node backup operator.
struct Backup {
  enum class Kind { kAverage, kPower, kMax };
  Kind kind = Kind::kAverage;
  double p = 1.0;

  static Backup average() { return {Kind::kAverage, 1.0}; }
  static Backup power(double p) { return {Kind::kPower, p}; }
  static Backup max() { return {Kind::kMax, std::numeric_limits<double>::infinity()}; }
};

struct Ucb1 {
  double c = 1.4142135623730951;
};

/// Extended empirical exponential weight: samples from
/// (1 - lambda) grad Omega*(Q_Omega) + lambda / |A| with
/// lambda = min(1, epsilon |A| / log(N + 1)).
struct E3w {
  RegularizerKind kind = RegularizerKind::shannon(0.1);
  double epsilon = 0.1;
};

using TreePolicy = std::variant<Ucb1, E3w>;

/// kMaxVisit breaks visit ties by the higher value estimate, then the lower
/// action index.
enum class Recommend { kMaxVisit, kMaxValue };

struct SearchConfig {
  std::size_t n_simulations = 1000;
  Backup backup = Backup::average();
  TreePolicy tree_policy = Ucb1{};
  double gamma = 0.95;
  /// Maximum number of steps in one simulation, tree part included. Returns
  /// beyond it are truncated to 0.
  int rollout_depth_limit = 100;
  std::uint64_t rng_seed = 0;
  /// Defaults to kMaxVisit for UCB1 and kMaxValue for E3W.
  std::optional<Recommend> recommend;

  bool is_e3w() const { return std::holds_alternative<E3w>(tree_policy); }
  Recommend recommendation() const {
    return recommend.value_or(is_e3w() ? Recommend::kMaxValue : Recommend::kMaxVisit);
  }
  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct QEdge {
  int action = 0;
  std::uint64_t n = 0;
  double cum_reward = 0.0;
  double q = 0.0;
  double q_reg = 0.0;
  /// Sum and count of returns from visits that ended without a child node
  /// (terminal successor, depth limit, or the rollout that created this edge's
  /// first statistics).
  double leaf_sum = 0.0;
  std::uint64_t leaf_count = 0;
  /// Successor nodes keyed by state key (MDP) or observation (POMDP).
  std::vector<std::pair<std::uint64_t, NodeId>> children;

  NodeId child(std::uint64_t key) const;
};

struct TreeNode {
  std::uint64_t key = 0;
  std::uint64_t N = 0;
  double v = 0.0;
  /// Regularized value Omega*(Q_Omega(s, .)), E3W mode only.
  double v_reg = 0.0;
  int depth = 0;
  std::vector<QEdge> edges;
  /// Previous policy, used as the prior of the Relative regularizer.
  Simplex prior_policy;
};

/// UCB1 over a node's edges; unvisited edges first, ties by lowest index.
int select_ucb1(const TreeNode& node, double c);

/// The E3W sampling distribution at a node under `kind`.
Simplex e3w_distribution(const TreeNode& node, const RegularizerKind& kind, double epsilon);

/// Mixture weight lambda for a node with `total_visits` visits and `n` actions.
double e3w_lambda(std::uint64_t total_visits, std::size_t n, double epsilon);

/// Samples from e3w_distribution.
int select_e3w(const TreeNode& node, const RegularizerKind& kind, double epsilon, Rng& rng);

/// Samples an index from a probability vector by inverse CDF.
int sample_index(std::span<const double> probs, Rng& rng);

/// V(s) of a node from its visited edges under `backup`. Q values are
/// shifted by -floor before a finite power mean and shifted back.
double backup_value(const TreeNode& node, const Backup& backup, double floor);

struct SearchResult {
  int recommended_action = 0;
  double root_value = 0.0;
  Simplex root_policy;
  std::vector<std::uint64_t> visit_histogram;
  std::vector<double> root_q;
  /// Root action taken by each simulation, in order.
  std::vector<int> root_choices;
  std::size_t simulations = 0;
  std::size_t tree_size = 0;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// One trajectory through the generative model. The key identifies the
/// successor among outcomes of the same action.
struct SimStep {
  double reward = 0.0;
  std::uint64_t key = 0;
  bool done = false;
};

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual SimStep step(int action, Rng& rng) = 0;
  virtual bool done() const = 0;
};

/// Search tree shared by the MDP and POMDP searches.
class SearchTree {
 public:
  /// `reward_min` feeds the value floor used by finite power means.
  SearchTree(const SearchConfig& config, int num_actions, std::uint64_t root_key, double reward_min);

  /// Runs one select, expand, rollout, backup iteration from `start`.
  void simulate(Trajectory& start, Rng& rng);

  SearchResult result() const;

  const SearchConfig& config() const { return config_; }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t size() const { return nodes_.size(); }
  int num_actions() const { return num_actions_; }
  double value_floor() const { return floor_; }
  const std::vector<int>& root_choices() const { return root_choices_; }

  /// Action the tree would take at `id` under the recommendation rule.
  int recommend(NodeId id) const;
  /// Child of `id` through `action` for outcome `key`, or kNoNode.
  NodeId child(NodeId id, int action, std::uint64_t key) const;

  /// Checks count conservation N(s) = sum_a n(s, a) and
  /// n(s, a) = leaf_count + sum N(children) at every node.
  bool counts_consistent() const;

 private:
  struct PathEntry {
    NodeId node;
    int action;
    double reward;
    NodeId child;  // kNoNode when the visit ended without a child node
  };

  NodeId add_node(std::uint64_t key, int depth);
  int select(NodeId id, Rng& rng);
  double rollout(Trajectory& traj, int depth, Rng& rng) const;
  void backup(const std::vector<PathEntry>& path, double leaf_return);
  void update_edge(QEdge& edge);
  void update_node(TreeNode& node);
  RegularizerKind node_kind(const TreeNode& node) const;
  double regularized_value(const TreeNode& node) const;

  SearchConfig config_;
  int num_actions_;
  double floor_;
  std::vector<TreeNode> nodes_;
  std::vector<int> root_choices_;
  std::vector<PathEntry> path_;
};

}  // namespace mctslab
