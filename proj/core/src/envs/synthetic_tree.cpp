#include "mctslab/envs/synthetic_tree.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace mctslab {

SyntheticTree::SyntheticTree(int k, int d, std::uint64_t seed, double sigma)
    : k_(k), d_(d), sigma_(sigma), seed_(seed) {
  if (k < 2) throw std::invalid_argument("synthetic tree: branching factor must be >= 2");
  if (d < 1) throw std::invalid_argument("synthetic tree: depth must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("synthetic tree: sigma must be >= 0");

  std::size_t level = 1;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    if (level > kMaxLeaves / static_cast<std::size_t>(k)) {
      throw std::invalid_argument("synthetic tree: more than " + std::to_string(kMaxLeaves) +
                                  " leaves");
    }
    first_leaf_ = total;
    level *= static_cast<std::size_t>(k);
    total += level;
  }

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  edges_.assign(total, 0.0);
  cumulative_.assign(total, 0.0);
  for (std::size_t node = 1; node < total; ++node) {
    edges_[node] = unit(rng);
    const std::size_t parent = (node - 1) / static_cast<std::size_t>(k);
    cumulative_[node] = cumulative_[parent] + edges_[node];
  }
  const auto [lo, hi] = std::minmax_element(cumulative_.begin() + static_cast<std::ptrdiff_t>(first_leaf_),
                                            cumulative_.end());
  leaf_min_ = *lo;
  leaf_max_ = *hi;
}

double SyntheticTree::leaf_mean(std::size_t leaf) const {
  if (!is_leaf(leaf) || leaf >= num_nodes()) {
    throw std::invalid_argument("synthetic tree: node " + std::to_string(leaf) + " is not a leaf");
  }
  if (leaf_max_ == leaf_min_) return 1.0;
  return (cumulative_[leaf] - leaf_min_) / (leaf_max_ - leaf_min_);
}

std::size_t SyntheticTree::node_at(std::span<const int> path) const {
  if (path.size() > static_cast<std::size_t>(d_)) {
    throw std::invalid_argument("synthetic tree: path longer than depth");
  }
  std::size_t node = 0;
  for (int a : path) {
    if (a < 0 || a >= k_) {
      throw std::invalid_argument("synthetic tree: action " + std::to_string(a) + " out of range");
    }
    node = child(node, a);
  }
  return node;
}

double SyntheticTree::leaf_mean(std::span<const int> path) const {
  if (path.size() != static_cast<std::size_t>(d_)) {
    throw std::invalid_argument("synthetic tree: path does not end at a leaf");
  }
  return leaf_mean(node_at(path));
}

double SyntheticTree::evaluate(std::span<const int> path, Rng& rng) const {
  if (path.size() != static_cast<std::size_t>(d_)) {
    throw std::invalid_argument("synthetic tree: path does not end at a leaf");
  }
  return sample_leaf(node_at(path), rng);
}

double SyntheticTree::sample_leaf(std::size_t leaf, Rng& rng) const {
  const double mean = leaf_mean(leaf);
  if (sigma_ == 0.0) return mean;
  const double x = std::normal_distribution<double>(mean, sigma_)(rng);
  const auto range = reward_range();
  return std::clamp(x, range.min, range.max);
}

RewardRange SyntheticTree::reward_range() const {
  // Six standard deviations around [0, 1]; the clamp is hit with probability ~1e-9.
  return {-6.0 * sigma_, 1.0 + 6.0 * sigma_};
}

SyntheticTreeEnv::SyntheticTreeEnv(std::shared_ptr<const SyntheticTree> tree)
    : tree_(std::move(tree)) {
  if (!tree_) throw std::invalid_argument("SyntheticTreeEnv: null tree");
}

std::unique_ptr<Environment> SyntheticTreeEnv::clone() const {
  return std::make_unique<SyntheticTreeEnv>(*this);
}

StepResult SyntheticTreeEnv::step(int action, Rng& rng) {
  check_action(action, tree_->branching(), "synthetic");
  if (done()) throw std::logic_error("synthetic: step after episode end");
  node_ = tree_->child(node_, action);
  if (tree_->is_leaf(node_)) {
    return {tree_->sample_leaf(node_, rng), true};
  }
  return {0.0, false};
}

}  // namespace mctslab
