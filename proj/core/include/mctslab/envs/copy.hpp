#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mctslab/environment.hpp"

namespace mctslab {

/// Copy task: transcribe an input band of characters onto an output band.
///
/// An action is a triple (move, write, character) flattened as
/// `(move * 2 + write) * alphabet + character`, so there are 4 * alphabet
/// actions. move is 0 (left) or 1 (right) and shifts the read head; write = 1
/// emits `character`. A correct character pays +1, a wrong one pays 0 and ends
/// the episode. The episode also ends once the whole band has been copied or
/// the time limit runs out. An alphabet of 36 gives 144 actions, 50 gives 200.
class CopyEnv final : public Environment {
 public:
  static constexpr int kDefaultBandLength = 40;
  static constexpr int kDefaultTimeLimit = 84;

  struct Action {
    int move = 1;
    bool write = false;
    int character = 0;
  };

  /// Draws a uniform random band from `seed`. Throws std::invalid_argument for
  /// non-positive sizes.
  CopyEnv(int alphabet, std::uint64_t seed, int band_length = kDefaultBandLength,
          int time_limit = kDefaultTimeLimit);
  /// Fixed band.
  CopyEnv(int alphabet, std::vector<int> band, int time_limit = kDefaultTimeLimit);

  std::unique_ptr<Environment> clone() const override;
  std::string name() const override { return "copy"; }
  int num_actions() const override { return 4 * alphabet_; }
  StepResult step(int action, Rng& rng) override;
  bool done() const override { return done_; }
  std::uint64_t state_key() const override;
  RewardRange reward_range() const override { return {0.0, 1.0}; }

  int encode(const Action& a) const;
  Action decode(int action) const;
  /// Action that writes the next expected character (moving right).
  int correct_action() const;

  int alphabet() const { return alphabet_; }
  int band_length() const { return static_cast<int>(band_->size()); }
  const std::vector<int>& band() const { return *band_; }
  int read_head() const { return read_; }
  int written() const { return written_; }
  int time() const { return time_; }
  int time_limit() const { return time_limit_; }

 private:
  int alphabet_;
  std::shared_ptr<const std::vector<int>> band_;
  int time_limit_;
  int read_ = 0;
  int written_ = 0;
  int time_ = 0;
  bool done_ = false;
};

}  // namespace mctslab
