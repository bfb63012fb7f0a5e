#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "mctslab/environment.hpp"
#include "mctslab/tree.hpp"

namespace mctslab {

/// Particle belief. Each particle is a POMDP instance holding one hidden state.
using Belief = std::vector<std::shared_ptr<const PomdpEnvironment>>;

inline constexpr std::size_t kDefaultParticles = 1000;
inline constexpr std::size_t kDefaultMaxAttempts = 100000;

/// Builds a history tree: each simulation samples a particle, then runs the
/// same select, expand, rollout, backup loop as the MDP search with nodes
/// keyed by observation. Throws UsageError for an empty belief.
SearchTree pomcp_tree(const Belief& belief, const SearchConfig& config);

SearchResult pomcp_search(const Belief& belief, const SearchConfig& config);

/// `count` independent draws from the model's initial-state distribution.
Belief initial_belief(const PomdpEnvironment& model, std::size_t count, Rng& rng);

/// Rejection filter: steps randomly drawn particles with `action` and keeps
/// non-terminal successors that emit `observation`, until `target` are kept or
/// `max_attempts` steps were spent. A short result is topped up by
/// resampling the kept particles. Throws BeliefCollapse if nothing matched,
/// UsageError for an empty belief.
Belief belief_update(const Belief& belief, int action, std::uint64_t observation, Rng& rng,
                     std::size_t target = kDefaultParticles,
                     std::size_t max_attempts = kDefaultMaxAttempts);

/// Non-terminal successors of randomly drawn particles under `action`,
/// ignoring the observation. Throws BeliefCollapse when none is found.
Belief belief_pushforward(const Belief& belief, int action, Rng& rng,
                          std::size_t target = kDefaultParticles);

/// Rebuilds a belief for an action-observation history by filtering fresh
/// initial samples step by step. Steps where the filter collapses fall back
/// to the unfiltered pushforward, which may itself throw BeliefCollapse.
/// Returns the belief and the number of steps that fell back.
std::pair<Belief, std::size_t> rebuild_belief(const PomdpEnvironment& model,
                                              const std::vector<std::pair<int, std::uint64_t>>& history,
                                              Rng& rng, std::size_t target = kDefaultParticles,
                                              std::size_t max_attempts = kDefaultMaxAttempts);

/// Wraps an MDP as a POMDP whose observation is the full state key. The
/// initial-state distribution is the point mass on the wrapped state.
class FullyObservable final : public PomdpEnvironment {
 public:
  explicit FullyObservable(std::unique_ptr<Environment> env);
  FullyObservable(const FullyObservable& other);
  FullyObservable& operator=(const FullyObservable&) = delete;

  std::unique_ptr<PomdpEnvironment> clone() const override;
  std::string name() const override { return env_->name(); }
  int num_actions() const override { return env_->num_actions(); }
  PomdpStepResult step(int action, Rng& rng) override;
  bool done() const override { return env_->done(); }
  RewardRange reward_range() const override { return env_->reward_range(); }
  std::unique_ptr<PomdpEnvironment> sample_initial(Rng& rng) const override;

  const Environment& env() const { return *env_; }

 private:
  std::unique_ptr<Environment> env_;
  std::shared_ptr<const Environment> initial_;
};

}  // namespace mctslab
