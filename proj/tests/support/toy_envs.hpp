#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mctslab/environment.hpp"

namespace toy {

/// One-step bandit: action a pays a draw from arm a, then the episode ends.
class Bandit final : public mctslab::Environment {
 public:
  enum class Kind { kBernoulli, kGaussian, kConstant };

  Bandit(std::vector<double> means, Kind kind, double sigma = 0.05, double scale = 1.0)
      : means_(std::move(means)), kind_(kind), sigma_(sigma), scale_(scale) {}

  std::unique_ptr<mctslab::Environment> clone() const override { return std::make_unique<Bandit>(*this); }
  std::string name() const override { return "bandit"; }
  int num_actions() const override { return static_cast<int>(means_.size()); }
  mctslab::StepResult step(int action, mctslab::Rng& rng) override {
    mctslab::check_action(action, num_actions(), "bandit");
    const double m = means_[static_cast<std::size_t>(action)];
    double r = m;
    if (kind_ == Kind::kBernoulli) r = std::bernoulli_distribution(m)(rng) ? 1.0 : 0.0;
    if (kind_ == Kind::kGaussian) r = std::clamp(std::normal_distribution<double>(m, sigma_)(rng), -1.0, 2.0);
    done_ = true;
    return {scale_ * r + poison_, true};
  }
  bool done() const override { return done_; }
  std::uint64_t state_key() const override { return done_ ? 1 : 0; }
  mctslab::RewardRange reward_range() const override {
    if (kind_ == Kind::kGaussian) return {-scale_, 2.0 * scale_};
    return {0.0, scale_};
  }
  /// Added to every reward; NaN makes the bandit emit corrupt rewards.
  void poison(double x) { poison_ = x; }

 private:
  std::vector<double> means_;
  Kind kind_;
  double sigma_;
  double scale_;
  double poison_ = 0.0;
  bool done_ = false;
};

/// Deterministic chain of `length` states; action 1 advances and pays
/// `reward` on the last step, action 0 ends the episode with nothing.
class Chain final : public mctslab::Environment {
 public:
  Chain(int length, double reward) : length_(length), reward_(reward) {}
  std::unique_ptr<mctslab::Environment> clone() const override { return std::make_unique<Chain>(*this); }
  std::string name() const override { return "chain"; }
  int num_actions() const override { return 2; }
  mctslab::StepResult step(int action, mctslab::Rng&) override {
    mctslab::check_action(action, 2, "chain");
    if (action == 0) {
      done_ = true;
      return {0.0, true};
    }
    ++pos_;
    done_ = pos_ == length_;
    return {done_ ? reward_ : 0.0, done_};
  }
  bool done() const override { return done_; }
  std::uint64_t state_key() const override { return static_cast<std::uint64_t>(pos_) * 2 + (done_ ? 1 : 0); }
  mctslab::RewardRange reward_range() const override { return {std::min(0.0, reward_), std::max(0.0, reward_)}; }

 private:
  int length_;
  double reward_;
  int pos_ = 0;
  bool done_ = false;
};

/// Three-state ring POMDP. The initial state is uniform; action a moves
/// the state by a, plus one more with probability 0.3. The observation is
/// the new state, or always 0 when blind.
class Ring final : public mctslab::PomdpEnvironment {
 public:
  explicit Ring(bool blind, int state = 0) : blind_(blind), state_(state) {}
  std::unique_ptr<mctslab::PomdpEnvironment> clone() const override { return std::make_unique<Ring>(*this); }
  std::string name() const override { return "ring"; }
  int num_actions() const override { return 2; }
  mctslab::PomdpStepResult step(int action, mctslab::Rng& rng) override {
    mctslab::check_action(action, 2, "ring");
    state_ = (state_ + action + (std::bernoulli_distribution(0.3)(rng) ? 1 : 0)) % 3;
    return {state_ == 2 ? 1.0 : 0.0, blind_ ? 0u : static_cast<std::uint64_t>(state_), false};
  }
  bool done() const override { return false; }
  mctslab::RewardRange reward_range() const override { return {0.0, 1.0}; }
  std::unique_ptr<mctslab::PomdpEnvironment> sample_initial(mctslab::Rng& rng) const override {
    return std::make_unique<Ring>(blind_, mctslab::uniform_index(rng, 3));
  }
  int state() const { return state_; }

 private:
  bool blind_;
  int state_;
};

}  // namespace toy
