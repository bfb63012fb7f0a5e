#include "mctslab/pomcp.hpp"

#include <string>

#include "mctslab/errors.hpp"

namespace mctslab {

namespace {

class PomdpTrajectory final : public Trajectory {
 public:
  explicit PomdpTrajectory(std::unique_ptr<PomdpEnvironment> env)
      : env_(std::move(env)), range_(env_->reward_range()) {}

  SimStep step(int action, Rng& rng) override {
    const PomdpStepResult r = env_->step(action, rng);
#ifndef NDEBUG
    if (!range_.contains(r.reward)) {
      throw CorruptionError(env_->name() + ": reward " + std::to_string(r.reward) +
                            " outside the declared range");
    }
#endif
    return {r.reward, r.observation, r.done};
  }
  bool done() const override { return env_->done(); }

 private:
  std::unique_ptr<PomdpEnvironment> env_;
  RewardRange range_;
};

void require_belief(const Belief& belief, const char* op) {
  if (belief.empty()) throw UsageError(std::string(op) + ": empty belief");
}

}  // namespace

SearchTree pomcp_tree(const Belief& belief, const SearchConfig& config) {
  require_belief(belief, "pomcp_search");
  const PomdpEnvironment& first = *belief.front();
  SearchTree tree(config, first.num_actions(), 0, first.reward_range().min);
  Rng rng(config.rng_seed);
  const int n = static_cast<int>(belief.size());
  for (std::size_t i = 0; i < config.n_simulations; ++i) {
    const auto& particle = belief[static_cast<std::size_t>(uniform_index(rng, n))];
    PomdpTrajectory traj(particle->clone());
    tree.simulate(traj, rng);
  }
  return tree;
}

SearchResult pomcp_search(const Belief& belief, const SearchConfig& config) {
  return pomcp_tree(belief, config).result();
}

Belief initial_belief(const PomdpEnvironment& model, std::size_t count, Rng& rng) {
  Belief out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(model.sample_initial(rng));
  return out;
}

Belief belief_update(const Belief& belief, int action, std::uint64_t observation, Rng& rng,
                     std::size_t target, std::size_t max_attempts) {
  require_belief(belief, "belief_update");
  const int n = static_cast<int>(belief.size());
  Belief kept;
  kept.reserve(target);
  for (std::size_t attempt = 0; attempt < max_attempts && kept.size() < target; ++attempt) {
    const auto& particle = belief[static_cast<std::size_t>(uniform_index(rng, n))];
    if (particle->done()) continue;
    auto next = particle->clone();
    const PomdpStepResult r = next->step(action, rng);
    if (r.observation == observation && !r.done) kept.push_back(std::move(next));
  }
  if (kept.empty()) {
    throw BeliefCollapse("belief_update: no particle matched observation " + std::to_string(observation));
  }
  const int matched = static_cast<int>(kept.size());
  while (kept.size() < target) kept.push_back(kept[static_cast<std::size_t>(uniform_index(rng, matched))]);
  return kept;
}

Belief belief_pushforward(const Belief& belief, int action, Rng& rng, std::size_t target) {
  require_belief(belief, "belief_pushforward");
  const int n = static_cast<int>(belief.size());
  Belief out;
  out.reserve(target);
  for (std::size_t attempt = 0; out.size() < target && attempt < 100 * target; ++attempt) {
    const auto& particle = belief[static_cast<std::size_t>(uniform_index(rng, n))];
    if (particle->done()) continue;
    auto next = particle->clone();
    if (next->step(action, rng).done) continue;
    out.push_back(std::move(next));
  }
  if (out.empty()) throw BeliefCollapse("belief_pushforward: no particle has a non-terminal successor");
  return out;
}

std::pair<Belief, std::size_t> rebuild_belief(const PomdpEnvironment& model,
                                              const std::vector<std::pair<int, std::uint64_t>>& history,
                                              Rng& rng, std::size_t target, std::size_t max_attempts) {
  Belief belief = initial_belief(model, target, rng);
  std::size_t fallbacks = 0;
  for (const auto& [action, observation] : history) {
    try {
      belief = belief_update(belief, action, observation, rng, target, max_attempts);
    } catch (const BeliefCollapse&) {
      belief = belief_pushforward(belief, action, rng, target);
      ++fallbacks;
    }
  }
  return {std::move(belief), fallbacks};
}

FullyObservable::FullyObservable(std::unique_ptr<Environment> env)
    : env_(std::move(env)), initial_(env_ ? env_->clone() : nullptr) {
  if (!env_) throw std::invalid_argument("FullyObservable: null environment");
}

FullyObservable::FullyObservable(const FullyObservable& other)
    : env_(other.env_->clone()), initial_(other.initial_) {}

std::unique_ptr<PomdpEnvironment> FullyObservable::clone() const {
  return std::make_unique<FullyObservable>(*this);
}

PomdpStepResult FullyObservable::step(int action, Rng& rng) {
  const StepResult r = env_->step(action, rng);
  return {r.reward, env_->state_key(), r.done};
}

std::unique_ptr<PomdpEnvironment> FullyObservable::sample_initial(Rng&) const {
  auto out = std::make_unique<FullyObservable>(*this);
  out->env_ = initial_->clone();
  return out;
}

}  // namespace mctslab
