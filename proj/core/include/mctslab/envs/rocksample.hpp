#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "mctslab/environment.hpp"

namespace mctslab {

struct RocksampleParams {
  int n = 7;
  int k = 8;
  /// Seeds the rock layout when `rocks` is empty.
  std::uint64_t layout_seed = 0;
  /// Explicit (x, y) rock cells; overrides layout_seed.
  std::vector<std::pair<int, int>> rocks;
  double good_reward = 10.0;
  double bad_reward = -10.0;
  double exit_reward = 10.0;
  /// Distance at which the sensor is correct with probability 3/4.
  double half_efficiency_distance = 20.0;
  /// 0 for no limit.
  int max_steps = 0;
};

/// Rocksample(n, k). The robot starts at (0, n/2) on an n x n grid and must
/// sample good rocks before leaving through the east edge. Actions are
/// 0 N, 1 E, 2 S, 3 W, 4 Sample, 5 + i Check rock i. Checking rock i at
/// distance d reports its true label with probability 0.5 (1 + 2^(-d/d0)).
/// Sampling a good rock pays good_reward and turns it bad; sampling a bad
/// rock or an empty cell pays bad_reward. Moving east off the grid pays
/// exit_reward and ends the episode. Moves into the other borders do nothing.
class RocksampleEnv final : public PomdpEnvironment {
 public:
  enum Observation : std::uint64_t { kNone = 0, kGood = 1, kBad = 2 };
  enum Action : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3, kSample = 4, kCheck = 5 };

  /// Labels drawn uniformly from `rng`. Throws std::invalid_argument for
  /// n < 1, k outside [0, min(64, n*n - 1)] or bad explicit rock cells.
  RocksampleEnv(const RocksampleParams& params, Rng& rng);
  /// Explicit labels, bit i set when rock i is good.
  RocksampleEnv(const RocksampleParams& params, std::uint64_t good_mask);

  std::unique_ptr<PomdpEnvironment> clone() const override;
  std::string name() const override { return "rocksample"; }
  int num_actions() const override { return layout_->params.k + 5; }
  PomdpStepResult step(int action, Rng& rng) override;
  bool done() const override { return done_; }
  RewardRange reward_range() const override;
  std::unique_ptr<PomdpEnvironment> sample_initial(Rng& rng) const override;

  int x() const { return x_; }
  int y() const { return y_; }
  int steps() const { return steps_; }
  std::uint64_t good_mask() const { return good_; }
  bool rock_good(int i) const { return (good_ >> i) & 1U; }
  const std::vector<std::pair<int, int>>& rocks() const { return layout_->params.rocks; }
  const RocksampleParams& params() const { return layout_->params; }
  /// Probability that checking rock i from the current cell is correct.
  double sensor_accuracy(int rock) const;
  void set_position(int x, int y);

 private:
  struct Layout {
    RocksampleParams params;
    std::vector<int> rock_at;  // cell -> rock index or -1
  };
  static std::shared_ptr<const Layout> make_layout(const RocksampleParams& params);

  std::shared_ptr<const Layout> layout_;
  int x_ = 0;
  int y_ = 0;
  int steps_ = 0;
  std::uint64_t good_ = 0;
  bool done_ = false;
};

}  // namespace mctslab
