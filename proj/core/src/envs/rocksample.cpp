#include "mctslab/envs/rocksample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mctslab {

std::shared_ptr<const RocksampleEnv::Layout> RocksampleEnv::make_layout(const RocksampleParams& params) {
  const int n = params.n;
  if (n < 1) throw std::invalid_argument("rocksample: n must be >= 1");
  if (params.k < 0 || params.k > 64 || params.k > n * n - 1) {
    throw std::invalid_argument("rocksample: rock count out of range");
  }
  if (params.max_steps < 0) throw std::invalid_argument("rocksample: max_steps must be >= 0");
  if (!(params.half_efficiency_distance > 0.0)) {
    throw std::invalid_argument("rocksample: half efficiency distance must be positive");
  }
  auto layout = std::make_shared<Layout>();
  layout->params = params;
  layout->rock_at.assign(static_cast<std::size_t>(n * n), -1);
  const int start_cell = (n / 2) * n;  // x = 0, y = n / 2
  auto& rocks = layout->params.rocks;
  if (rocks.empty()) {
    Rng rng(params.layout_seed);
    while (static_cast<int>(rocks.size()) < params.k) {
      const int x = uniform_index(rng, n);
      const int y = uniform_index(rng, n);
      const int cell = y * n + x;
      if (cell == start_cell || layout->rock_at[static_cast<std::size_t>(cell)] >= 0) continue;
      layout->rock_at[static_cast<std::size_t>(cell)] = static_cast<int>(rocks.size());
      rocks.emplace_back(x, y);
    }
  } else {
    if (static_cast<int>(rocks.size()) != params.k) {
      throw std::invalid_argument("rocksample: rock list size differs from k");
    }
    for (std::size_t i = 0; i < rocks.size(); ++i) {
      const auto [x, y] = rocks[i];
      if (x < 0 || x >= n || y < 0 || y >= n) throw std::invalid_argument("rocksample: rock off grid");
      const int cell = y * n + x;
      if (layout->rock_at[static_cast<std::size_t>(cell)] >= 0) {
        throw std::invalid_argument("rocksample: two rocks share a cell");
      }
      layout->rock_at[static_cast<std::size_t>(cell)] = static_cast<int>(i);
    }
  }
  return layout;
}

RocksampleEnv::RocksampleEnv(const RocksampleParams& params, std::uint64_t good_mask)
    : layout_(make_layout(params)), x_(0), y_(params.n / 2) {
  const int k = params.k;
  good_ = k == 64 ? good_mask : good_mask & ((std::uint64_t{1} << k) - 1);
}

RocksampleEnv::RocksampleEnv(const RocksampleParams& params, Rng& rng)
    : RocksampleEnv(params, std::uint64_t{0}) {
  for (int i = 0; i < params.k; ++i) {
    if (uniform_index(rng, 2) == 1) good_ |= std::uint64_t{1} << i;
  }
}

std::unique_ptr<PomdpEnvironment> RocksampleEnv::clone() const {
  return std::make_unique<RocksampleEnv>(*this);
}

std::unique_ptr<PomdpEnvironment> RocksampleEnv::sample_initial(Rng& rng) const {
  auto env = std::make_unique<RocksampleEnv>(*this);
  env->x_ = 0;
  env->y_ = layout_->params.n / 2;
  env->steps_ = 0;
  env->done_ = false;
  env->good_ = 0;
  for (int i = 0; i < layout_->params.k; ++i) {
    if (uniform_index(rng, 2) == 1) env->good_ |= std::uint64_t{1} << i;
  }
  return env;
}

RewardRange RocksampleEnv::reward_range() const {
  const auto& p = layout_->params;
  return {std::min({0.0, p.bad_reward, p.good_reward, p.exit_reward}),
          std::max({0.0, p.bad_reward, p.good_reward, p.exit_reward})};
}

double RocksampleEnv::sensor_accuracy(int rock) const {
  const auto [rx, ry] = rocks().at(static_cast<std::size_t>(rock));
  const double d = std::hypot(static_cast<double>(rx - x_), static_cast<double>(ry - y_));
  return 0.5 * (1.0 + std::exp2(-d / layout_->params.half_efficiency_distance));
}

void RocksampleEnv::set_position(int x, int y) {
  const int n = layout_->params.n;
  if (x < 0 || x >= n || y < 0 || y >= n) throw std::out_of_range("rocksample: position");
  x_ = x;
  y_ = y;
}

PomdpStepResult RocksampleEnv::step(int action, Rng& rng) {
  const auto& p = layout_->params;
  check_action(action, p.k + 5, "rocksample");
  if (done_) throw std::logic_error("rocksample: step after episode end");
  PomdpStepResult out{0.0, kNone, false};
  switch (action) {
    case kNorth: y_ = std::min(y_ + 1, p.n - 1); break;
    case kSouth: y_ = std::max(y_ - 1, 0); break;
    case kWest: x_ = std::max(x_ - 1, 0); break;
    case kEast:
      if (x_ + 1 >= p.n) {
        out.reward = p.exit_reward;
        done_ = true;
      } else {
        ++x_;
      }
      break;
    case kSample: {
      const int rock = layout_->rock_at[static_cast<std::size_t>(y_ * p.n + x_)];
      if (rock >= 0 && rock_good(rock)) {
        out.reward = p.good_reward;
        good_ &= ~(std::uint64_t{1} << rock);
      } else {
        out.reward = p.bad_reward;
      }
      break;
    }
    default: {
      const int rock = action - kCheck;
      const bool truth = rock_good(rock);
      const bool correct = uniform01(rng) < sensor_accuracy(rock);
      out.observation = (truth == correct) ? kGood : kBad;
      break;
    }
  }
  ++steps_;
  if (p.max_steps > 0 && steps_ >= p.max_steps) done_ = true;
  out.done = done_;
  return out;
}

}  // namespace mctslab
