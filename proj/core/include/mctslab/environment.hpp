#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "mctslab/rng.hpp"

namespace mctslab {

/// Closed interval containing every immediate reward an environment emits.
struct RewardRange {
  double min = 0.0;
  double max = 1.0;
  bool contains(double r) const { return r >= min && r <= max; }
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

/// Generative model of a fully observable MDP. An instance is one state of
/// the process; step() mutates it in place. Instances are single-owner, use
/// clone() to branch.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::unique_ptr<Environment> clone() const = 0;
  virtual std::string name() const = 0;

  /// Size of the (state independent) action set; actions are 0..n-1.
  virtual int num_actions() const = 0;
  /// Throws std::out_of_range for an illegal action id.
  virtual StepResult step(int action, Rng& rng) = 0;
  virtual bool done() const = 0;
  /// Identifies the current state among siblings reached by the same action.
  virtual std::uint64_t state_key() const = 0;
  virtual RewardRange reward_range() const = 0;
};

struct PomdpStepResult {
  double reward = 0.0;
  std::uint64_t observation = 0;
  bool done = false;
};

/// Generative model of a POMDP. An instance carries one hidden state and
/// doubles as a belief particle.
class PomdpEnvironment {
 public:
  virtual ~PomdpEnvironment() = default;

  virtual std::unique_ptr<PomdpEnvironment> clone() const = 0;
  virtual std::string name() const = 0;

  virtual int num_actions() const = 0;
  virtual PomdpStepResult step(int action, Rng& rng) = 0;
  virtual bool done() const = 0;
  virtual RewardRange reward_range() const = 0;

  /// A fresh episode start drawn from the initial-state distribution.
  virtual std::unique_ptr<PomdpEnvironment> sample_initial(Rng& rng) const = 0;
};

/// Throws std::out_of_range unless 0 <= action < n.
inline void check_action(int action, int n, const char* env_name) {
  if (action < 0 || action >= n) {
    throw std::out_of_range(std::string(env_name) + ": illegal action " + std::to_string(action));
  }
}

}  // namespace mctslab
