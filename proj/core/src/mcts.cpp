#include "mctslab/mcts.hpp"

#include <string>

#include "mctslab/errors.hpp"

namespace mctslab {

namespace {

class MdpTrajectory final : public Trajectory {
 public:
  explicit MdpTrajectory(std::unique_ptr<Environment> env)
      : env_(std::move(env)), range_(env_->reward_range()) {}

  SimStep step(int action, Rng& rng) override {
    const StepResult r = env_->step(action, rng);
#ifndef NDEBUG
    if (!range_.contains(r.reward)) {
      throw CorruptionError(env_->name() + ": reward " + std::to_string(r.reward) +
                            " outside the declared range");
    }
#endif
    return {r.reward, env_->state_key(), r.done};
  }
  bool done() const override { return env_->done(); }

 private:
  std::unique_ptr<Environment> env_;
  RewardRange range_;
};

}  // namespace

SearchTree build_tree(const Environment& env, const SearchConfig& config) {
  SearchTree tree(config, env.num_actions(), env.state_key(), env.reward_range().min);
  if (env.done()) throw UsageError("search: root state is terminal");
  Rng rng(config.rng_seed);
  for (std::size_t i = 0; i < config.n_simulations; ++i) {
    MdpTrajectory traj(env.clone());
    tree.simulate(traj, rng);
  }
  return tree;
}

SearchResult search(const Environment& env, const SearchConfig& config) {
  return build_tree(env, config).result();
}

}  // namespace mctslab
