#pragma once

#include "mctslab/environment.hpp"
#include "mctslab/tree.hpp"

namespace mctslab {

/// Builds a search tree from the environment's current state with
/// config.n_simulations simulations seeded by config.rng_seed.
SearchTree build_tree(const Environment& env, const SearchConfig& config);

/// MCTS for a fully observable MDP: select, expand one node, uniform random
/// rollout, back up. Environment exceptions propagate.
SearchResult search(const Environment& env, const SearchConfig& config);

}  // namespace mctslab
