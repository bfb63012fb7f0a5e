#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mctslab/environment.hpp"

namespace mctslab {

/// Complete k-ary tree of depth d with U[0,1] edge values. A leaf's mean is the
/// sum of edge values along its root path, min-max normalized over all leaves
/// so the best leaf has mean 1 and the worst has mean 0. Evaluating a leaf
/// draws N(mean, sigma^2).
///
/// Nodes use heap numbering: the root is 0 and the children of node i are
/// i*k + 1 ... i*k + k.
class SyntheticTree {
 public:
  static constexpr double kDefaultSigma = 0.05;
  /// Largest tree (in leaves) this class will materialize.
  static constexpr std::size_t kMaxLeaves = 10'000'000;

  /// Throws std::invalid_argument for k < 2, d < 1, sigma < 0 or more than
  /// kMaxLeaves leaves.
  SyntheticTree(int k, int d, std::uint64_t seed, double sigma = kDefaultSigma);

  int branching() const { return k_; }
  int depth() const { return d_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t num_nodes() const { return cumulative_.size(); }
  std::size_t num_leaves() const { return num_nodes() - first_leaf_; }
  std::size_t first_leaf() const { return first_leaf_; }
  bool is_leaf(std::size_t node) const { return node >= first_leaf_; }
  std::size_t child(std::size_t node, int action) const {
    return node * static_cast<std::size_t>(k_) + static_cast<std::size_t>(action) + 1;
  }

  /// Value on the edge entering `node` (node > 0).
  double edge_value(std::size_t node) const { return edges_.at(node); }
  const std::vector<double>& edge_values() const { return edges_; }

  /// Normalized mean of a leaf node.
  double leaf_mean(std::size_t leaf) const;
  /// Node reached by following `path` from the root. Throws
  /// std::invalid_argument for out-of-range actions or paths longer than d.
  std::size_t node_at(std::span<const int> path) const;
  /// Normalized mean of the leaf at the end of a full-length path.
  double leaf_mean(std::span<const int> path) const;
  /// One noisy evaluation of the leaf at the end of `path`.
  double evaluate(std::span<const int> path, Rng& rng) const;
  /// Noisy evaluation of a leaf node, clamped to the declared reward range.
  double sample_leaf(std::size_t leaf, Rng& rng) const;

  RewardRange reward_range() const;

 private:
  int k_;
  int d_;
  double sigma_;
  std::uint64_t seed_;
  std::size_t first_leaf_ = 0;
  std::vector<double> edges_;       // per node, edge into it (0 for the root)
  std::vector<double> cumulative_;  // per node, sum of edges on the root path
  double leaf_min_ = 0.0;
  double leaf_max_ = 1.0;
};

/// The synthetic tree as an undiscounted episodic MDP. Internal transitions
/// pay 0; entering a leaf pays a noisy leaf evaluation and ends the episode.
class SyntheticTreeEnv final : public Environment {
 public:
  explicit SyntheticTreeEnv(std::shared_ptr<const SyntheticTree> tree);

  std::unique_ptr<Environment> clone() const override;
  std::string name() const override { return "synthetic"; }
  int num_actions() const override { return tree_->branching(); }
  StepResult step(int action, Rng& rng) override;
  bool done() const override { return tree_->is_leaf(node_); }
  std::uint64_t state_key() const override { return node_; }
  RewardRange reward_range() const override { return tree_->reward_range(); }

  std::size_t node() const { return node_; }
  const SyntheticTree& tree() const { return *tree_; }
  std::shared_ptr<const SyntheticTree> shared_tree() const { return tree_; }

 private:
  std::shared_ptr<const SyntheticTree> tree_;
  std::size_t node_ = 0;
};

}  // namespace mctslab
