#include "mctslab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mctslab/errors.hpp"

namespace mctslab {

namespace {

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw CorruptionError(std::string("non-finite ") + what);
}

struct Scratch {
  std::vector<double> values;
  std::vector<double> weights;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

void SearchConfig::validate() const {
  if (n_simulations < 1) throw std::invalid_argument("n_simulations must be >= 1");
  if (backup.kind == Backup::Kind::kPower && !(backup.p >= 1.0)) {
    throw std::invalid_argument("power backup requires p >= 1");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (rollout_depth_limit < 1) throw std::invalid_argument("rollout_depth_limit must be >= 1");
  if (const auto* u = std::get_if<Ucb1>(&tree_policy)) {
    if (!(u->c >= 0.0) || !std::isfinite(u->c)) throw std::invalid_argument("ucb c must be finite and >= 0");
  } else {
    const auto& e = std::get<E3w>(tree_policy);
    if (!(e.epsilon > 0.0) || !std::isfinite(e.epsilon)) throw std::invalid_argument("e3w epsilon must be > 0");
  }
}

NodeId QEdge::child(std::uint64_t key) const {
  for (const auto& [k, id] : children) {
    if (k == key) return id;
  }
  return kNoNode;
}

int select_ucb1(const TreeNode& node, double c) {
  if (node.edges.empty()) throw UsageError("select_ucb1: node has no edges");
  const double log_n = std::log(static_cast<double>(std::max<std::uint64_t>(node.N, 1)));
  int best = -1;
  double best_score = 0.0;
  for (const QEdge& e : node.edges) {
    if (e.n == 0) return e.action;
    const double score = e.q + c * std::sqrt(log_n / static_cast<double>(e.n));
    if (best < 0 || score > best_score) {
      best = e.action;
      best_score = score;
    }
  }
  return best;
}

double e3w_lambda(std::uint64_t total_visits, std::size_t n, double epsilon) {
  const double denom = std::log(static_cast<double>(total_visits) + 1.0);
  if (denom <= 0.0) return 1.0;
  return std::min(1.0, epsilon * static_cast<double>(n) / denom);
}

Simplex e3w_distribution(const TreeNode& node, const RegularizerKind& kind, double epsilon) {
  const std::size_t n = node.edges.size();
  if (n == 0) throw UsageError("select_e3w: node has no edges");
  std::uint64_t total = 0;
  for (const QEdge& e : node.edges) total += e.n;
  const double lambda = e3w_lambda(total, n, epsilon);
  Simplex out(n, 1.0 / static_cast<double>(n));
  if (lambda >= 1.0) return out;
  auto& q = scratch().values;
  q.resize(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = node.edges[i].q_reg;
  const Simplex pi = policy(kind, q);
  for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - lambda) * pi[i] + lambda / static_cast<double>(n);
  return out;
}

int sample_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

int select_e3w(const TreeNode& node, const RegularizerKind& kind, double epsilon, Rng& rng) {
  const Simplex dist = e3w_distribution(node, kind, epsilon);
  return node.edges[static_cast<std::size_t>(sample_index(dist, rng))].action;
}

double backup_value(const TreeNode& node, const Backup& backup, double floor) {
  auto& [values, weights] = scratch();
  values.clear();
  weights.clear();
  for (const QEdge& e : node.edges) {
    if (e.n == 0) continue;
    values.push_back(e.q);
    weights.push_back(static_cast<double>(e.n));
  }
  if (values.empty()) return 0.0;
  switch (backup.kind) {
    case Backup::Kind::kAverage: return weighted_mean({values, weights});
    case Backup::Kind::kMax: return *std::max_element(values.begin(), values.end());
    case Backup::Kind::kPower:
      if (std::isinf(backup.p)) return *std::max_element(values.begin(), values.end());
      for (double& v : values) v = std::max(v - floor, 0.0);
      return power_mean({values, weights}, PowerExponent(backup.p)) + floor;
  }
  return 0.0;
}

SearchTree::SearchTree(const SearchConfig& config, int num_actions, std::uint64_t root_key, double reward_min)
    : config_(config), num_actions_(num_actions) {
  config_.validate();
  if (num_actions < 1) throw std::invalid_argument("search: environment has no actions");
  const double per_step = std::min(0.0, reward_min);
  const int h = config_.rollout_depth_limit;
  const double g = config_.gamma;
  const double horizon = g == 1.0 ? static_cast<double>(h) : (1.0 - std::pow(g, h)) / (1.0 - g);
  floor_ = per_step * horizon;
  nodes_.reserve(std::min<std::size_t>(config_.n_simulations + 1, 1u << 20));
  add_node(root_key, 0);
  root_choices_.reserve(config_.n_simulations);
}

NodeId SearchTree::add_node(std::uint64_t key, int depth) {
  if (nodes_.size() >= static_cast<std::size_t>(kNoNode)) throw std::length_error("search tree full");
  TreeNode node;
  node.key = key;
  node.depth = depth;
  node.edges.resize(static_cast<std::size_t>(num_actions_));
  for (int a = 0; a < num_actions_; ++a) node.edges[static_cast<std::size_t>(a)].action = a;
  if (const auto* e = std::get_if<E3w>(&config_.tree_policy); e && e->kind.is_relative()) {
    node.prior_policy.assign(static_cast<std::size_t>(num_actions_), 1.0 / num_actions_);
  }
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId SearchTree::child(NodeId id, int action, std::uint64_t key) const {
  return nodes_.at(id).edges.at(static_cast<std::size_t>(action)).child(key);
}

RegularizerKind SearchTree::node_kind(const TreeNode& node) const {
  const auto& kind = std::get<E3w>(config_.tree_policy).kind;
  if (!kind.is_relative()) return kind;
  return kind.with_prior(node.prior_policy);
}

double SearchTree::regularized_value(const TreeNode& node) const {
  auto& q = scratch().values;
  q.resize(node.edges.size());
  for (std::size_t i = 0; i < node.edges.size(); ++i) q[i] = node.edges[i].q_reg;
  return value(node_kind(node), q);
}

int SearchTree::select(NodeId id, Rng& rng) {
  TreeNode& node = nodes_[id];
  if (const auto* u = std::get_if<Ucb1>(&config_.tree_policy)) return select_ucb1(node, u->c);
  const auto& e3w = std::get<E3w>(config_.tree_policy);
  const RegularizerKind kind = node_kind(node);
  const int a = select_e3w(node, kind, e3w.epsilon, rng);
  if (kind.is_relative()) {
    auto& q = scratch().values;
    q.resize(node.edges.size());
    for (std::size_t i = 0; i < node.edges.size(); ++i) q[i] = node.edges[i].q_reg;
    Simplex pi = policy(kind, q);
    double total = 0.0;
    for (double& x : pi) {
      x = std::max(x, 1e-12);
      total += x;
    }
    for (double& x : pi) x /= total;
    node.prior_policy = std::move(pi);
  }
  return a;
}

double SearchTree::rollout(Trajectory& traj, int depth, Rng& rng) const {
  double ret = 0.0;
  double discount = 1.0;
  while (!traj.done() && depth < config_.rollout_depth_limit) {
    const SimStep st = traj.step(uniform_index(rng, num_actions_), rng);
    check_finite(st.reward, "reward");
    ret += discount * st.reward;
    discount *= config_.gamma;
    ++depth;
    if (st.done) break;
  }
  return ret;
}

void SearchTree::simulate(Trajectory& start, Rng& rng) {
  path_.clear();
  NodeId cur = 0;
  int depth = 0;
  bool expanded = false;
  double leaf_return = 0.0;
  while (true) {
    const int a = select(cur, rng);
    if (cur == 0) root_choices_.push_back(a);
    const SimStep st = start.step(a, rng);
    check_finite(st.reward, "reward");
    ++depth;
    if (st.done || depth >= config_.rollout_depth_limit) {
      path_.push_back({cur, a, st.reward, kNoNode});
      break;
    }
    NodeId next = child(cur, a, st.key);
    if (next == kNoNode) {
      if (expanded) {
        path_.push_back({cur, a, st.reward, kNoNode});
        leaf_return = rollout(start, depth, rng);
        break;
      }
      next = add_node(st.key, depth);
      nodes_[cur].edges[static_cast<std::size_t>(a)].children.emplace_back(st.key, next);
      expanded = true;
    }
    path_.push_back({cur, a, st.reward, next});
    cur = next;
  }
  backup(path_, leaf_return);
}

void SearchTree::backup(const std::vector<PathEntry>& path, double leaf_return) {
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    TreeNode& node = nodes_[it->node];
    QEdge& edge = node.edges[static_cast<std::size_t>(it->action)];
    ++edge.n;
    ++node.N;
    edge.cum_reward += it->reward;
    if (it->child == kNoNode) {
      edge.leaf_sum += leaf_return;
      ++edge.leaf_count;
    }
    update_edge(edge);
    update_node(node);
  }
}

void SearchTree::update_edge(QEdge& edge) {
  double sum_v = edge.leaf_sum;
  double sum_v_reg = edge.leaf_sum;
  for (const auto& [key, id] : edge.children) {
    const TreeNode& c = nodes_[id];
    const double w = static_cast<double>(c.N);
    sum_v += w * c.v;
    sum_v_reg += w * c.v_reg;
  }
  const double n = static_cast<double>(edge.n);
  edge.q = (edge.cum_reward + config_.gamma * sum_v) / n;
  check_finite(edge.q, "Q value");
  if (config_.is_e3w()) {
    edge.q_reg = (edge.cum_reward + config_.gamma * sum_v_reg) / n;
    check_finite(edge.q_reg, "regularized Q value");
  }
}

void SearchTree::update_node(TreeNode& node) {
  node.v = backup_value(node, config_.backup, floor_);
  check_finite(node.v, "V value");
  if (config_.is_e3w()) {
    node.v_reg = regularized_value(node);
    check_finite(node.v_reg, "regularized V value");
  }
}

int SearchTree::recommend(NodeId id) const {
  const TreeNode& node = nodes_.at(id);
  int best = 0;
  if (config_.recommendation() == Recommend::kMaxVisit) {
    // Visit ties go to the higher value estimate, then the lower index.
    const bool reg = config_.is_e3w();
    for (const QEdge& e : node.edges) {
      const QEdge& b = node.edges[static_cast<std::size_t>(best)];
      const bool tie_better = e.n == b.n && e.n > 0 && (reg ? e.q_reg > b.q_reg : e.q > b.q);
      if (e.n > b.n || tie_better) best = e.action;
    }
    return best;
  }
  const bool reg = config_.is_e3w();
  bool found = false;
  double best_value = 0.0;
  for (const QEdge& e : node.edges) {
    if (e.n == 0) continue;
    const double v = reg ? e.q_reg : e.q;
    if (!found || v > best_value) {
      found = true;
      best = e.action;
      best_value = v;
    }
  }
  return best;
}

SearchResult SearchTree::result() const {
  const TreeNode& r = root();
  SearchResult out;
  out.recommended_action = recommend(0);
  out.simulations = root_choices_.size();
  out.tree_size = nodes_.size();
  out.root_choices = root_choices_;
  const std::size_t n = r.edges.size();
  out.visit_histogram.resize(n);
  out.root_q.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.visit_histogram[i] = r.edges[i].n;
  if (config_.is_e3w()) {
    for (std::size_t i = 0; i < n; ++i) out.root_q[i] = r.edges[i].q_reg;
    out.root_value = r.v_reg;
    out.root_policy = policy(node_kind(r), out.root_q);
  } else {
    for (std::size_t i = 0; i < n; ++i) out.root_q[i] = r.edges[i].q;
    out.root_value = r.v;
    out.root_policy.assign(n, r.N == 0 ? 1.0 / static_cast<double>(n) : 0.0);
    if (r.N > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        out.root_policy[i] = static_cast<double>(r.edges[i].n) / static_cast<double>(r.N);
      }
    }
  }
  return out;
}

bool SearchTree::counts_consistent() const {
  for (const TreeNode& node : nodes_) {
    std::uint64_t total = 0;
    for (const QEdge& e : node.edges) {
      total += e.n;
      std::uint64_t below = e.leaf_count;
      for (const auto& [key, id] : e.children) below += nodes_[id].N;
      if (below != e.n) return false;
    }
    if (total != node.N) return false;
  }
  return root().N == root_choices_.size();
}

}  // namespace mctslab
