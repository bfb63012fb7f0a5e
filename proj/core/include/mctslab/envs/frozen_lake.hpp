#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mctslab/environment.hpp"

namespace mctslab {

/// Slippery grid lake. Tiles: S start, F frozen, H hole, G goal. The agent
/// moves in the intended direction or one of the two perpendicular ones, each
/// with probability 1/3; moves into the border leave it in place. Reaching G
/// pays 1; G, H and the step limit end the episode.
class FrozenLake final : public Environment {
 public:
  enum Action : int { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

  static constexpr int kDefaultStepLimit = 200;

  /// The 8x8 layout used by the standard gym benchmark.
  static const std::vector<std::string>& canonical_map();

  /// Throws std::invalid_argument for ragged maps, unknown tiles or a map
  /// without exactly one S and at least one G.
  explicit FrozenLake(std::vector<std::string> map = canonical_map(),
                      int step_limit = kDefaultStepLimit);

  std::unique_ptr<Environment> clone() const override;
  std::string name() const override { return "frozenlake"; }
  int num_actions() const override { return 4; }
  StepResult step(int action, Rng& rng) override;
  bool done() const override;
  std::uint64_t state_key() const override;
  RewardRange reward_range() const override { return {0.0, 1.0}; }

  /// Direction actually taken for an intended action.
  static int slip(int action, Rng& rng);
  /// Deterministic move in `direction`, clamped at the border.
  void move(int direction);

  int row() const { return row_; }
  int col() const { return col_; }
  int steps() const { return steps_; }
  int step_limit() const { return step_limit_; }
  int rows() const;
  int cols() const;
  char tile(int r, int c) const;
  bool at_goal() const { return tile(row_, col_) == 'G'; }
  bool in_hole() const { return tile(row_, col_) == 'H'; }
  void set_position(int r, int c);

 private:
  std::shared_ptr<const std::vector<std::string>> map_;
  int step_limit_;
  int row_ = 0;
  int col_ = 0;
  int steps_ = 0;
};

}  // namespace mctslab
