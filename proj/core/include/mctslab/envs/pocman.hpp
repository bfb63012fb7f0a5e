#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mctslab/environment.hpp"

namespace mctslab {

struct PocmanParams {
  int num_ghosts = 4;
  /// Probability that a nearby ghost chases (or flees when powered).
  double chase_prob = 0.75;
  int ghost_range = 5;
  int power_steps = 15;
  double food_prob = 0.5;
  int smell_range = 1;
  int hear_range = 2;
  double step_reward = -1.0;
  double food_reward = 10.0;
  double ghost_reward = 25.0;
  double death_reward = -100.0;
  /// 0 for no limit.
  int max_steps = 0;
};

/// PocMan on a 17 x 19 maze. Each step pays step_reward; moving onto a food
/// pellet or power pill pays food_reward; a power pill lets PocMan eat ghosts
/// (ghost_reward, ghost sent home) for power_steps steps; meeting a ghost
/// otherwise pays death_reward and ends the episode, as does clearing all food.
/// Ghosts within Manhattan distance ghost_range chase PocMan with probability
/// chase_prob (flee while he is powered) and otherwise wander without
/// reversing.
///
/// Observations are 10 bits: bits 0-3 a ghost is visible along the corridor
/// in direction d, bits 4-7 a wall is adjacent in direction d, bit 8 food
/// within smell_range, bit 9 a ghost within hear_range. Directions and actions
/// are 0 N, 1 E, 2 S, 3 W.
class PocmanEnv final : public PomdpEnvironment {
 public:
  static constexpr int kWidth = 17;
  static constexpr int kHeight = 19;
  static constexpr int kCells = kWidth * kHeight;
  static constexpr int kMaxGhosts = 4;

  struct Pos {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pos&, const Pos&) = default;
  };

  /// Rows of the maze, top first: '#' wall, '.' food cell, 'o' power pill,
  /// 'P' PocMan start, 'G' ghost start.
  static const std::vector<std::string>& maze();

  PocmanEnv(const PocmanParams& params, Rng& rng);

  std::unique_ptr<PomdpEnvironment> clone() const override;
  std::string name() const override { return "pocman"; }
  int num_actions() const override { return 4; }
  PomdpStepResult step(int action, Rng& rng) override;
  bool done() const override { return done_; }
  RewardRange reward_range() const override;
  std::unique_ptr<PomdpEnvironment> sample_initial(Rng& rng) const override;

  /// Observation for the current state.
  std::uint64_t observe() const;

  const PocmanParams& params() const { return *params_; }
  Pos pocman() const { return pocman_; }
  int num_ghosts() const { return params_->num_ghosts; }
  Pos ghost(int i) const { return ghosts_.at(static_cast<std::size_t>(i)); }
  int power_left() const { return power_; }
  int steps() const { return steps_; }
  bool food_at(Pos p) const { return food_.test(index(p)); }
  int food_left() const { return static_cast<int>(food_.count()); }
  static bool passable(Pos p);

  void set_pocman(Pos p);
  void set_ghost(int i, Pos p);
  void set_food(Pos p, bool present);
  void clear_food() { food_.reset(); }
  void set_power(int steps) { power_ = steps; }

 private:
  static std::size_t index(Pos p) { return static_cast<std::size_t>(p.y * kWidth + p.x); }
  static Pos next(Pos p, int dir);
  void move_ghost(int i, Rng& rng);
  double resolve_collisions();

  std::shared_ptr<const PocmanParams> params_;
  Pos pocman_;
  std::array<Pos, kMaxGhosts> ghosts_{};
  std::array<int, kMaxGhosts> ghost_dir_{};
  std::bitset<kCells> food_;
  int power_ = 0;
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace mctslab
