#include "mctslab/envs/pocman.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace mctslab {

namespace {

int manhattan(PocmanEnv::Pos a, PocmanEnv::Pos b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

std::vector<PocmanEnv::Pos> find_ghost_starts() {
  std::vector<PocmanEnv::Pos> out;
  const auto& m = PocmanEnv::maze();
  for (int y = 0; y < PocmanEnv::kHeight; ++y) {
    for (int x = 0; x < PocmanEnv::kWidth; ++x) {
      if (m[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == 'G') out.push_back({x, y});
    }
  }
  return out;
}

const std::vector<PocmanEnv::Pos>& ghost_starts() {
  static const std::vector<PocmanEnv::Pos> starts = find_ghost_starts();
  return starts;
}

PocmanEnv::Pos pocman_start() {
  const auto& m = PocmanEnv::maze();
  for (int y = 0; y < PocmanEnv::kHeight; ++y) {
    const auto x = m[static_cast<std::size_t>(y)].find('P');
    if (x != std::string::npos) return {static_cast<int>(x), y};
  }
  throw std::logic_error("pocman: maze has no start");
}

char tile(PocmanEnv::Pos p) {
  return PocmanEnv::maze()[static_cast<std::size_t>(p.y)][static_cast<std::size_t>(p.x)];
}

}  // namespace

const std::vector<std::string>& PocmanEnv::maze() {
  static const std::vector<std::string> rows = {
      "o.......#.......o",
      ".##.###.#.###.##.",
      ".................",
      ".##.#.#####.#.##.",
      "....#...#...#....",
      "###.###.#.###.###",
      "###.#.......#.###",
      "###.#.##G##.#.###",
      "......#GGG#......",
      "###.#.#####.#.###",
      "###.#.......#.###",
      "###.#.#####.#.###",
      "........#........",
      ".##.###.#.###.##.",
      "o.#.....P.....#.o",
      "#.#.#.#####.#.#.#",
      "....#...#...#....",
      ".######.#.######.",
      ".................",
  };
  return rows;
}

bool PocmanEnv::passable(Pos p) {
  return p.x >= 0 && p.x < kWidth && p.y >= 0 && p.y < kHeight && tile(p) != '#';
}

PocmanEnv::Pos PocmanEnv::next(Pos p, int dir) {
  switch (dir) {
    case 0: return {p.x, p.y - 1};
    case 1: return {p.x + 1, p.y};
    case 2: return {p.x, p.y + 1};
    default: return {p.x - 1, p.y};
  }
}

PocmanEnv::PocmanEnv(const PocmanParams& params, Rng& rng)
    : params_(std::make_shared<const PocmanParams>(params)), pocman_(pocman_start()) {
  if (params.num_ghosts < 0 || params.num_ghosts > kMaxGhosts) {
    throw std::invalid_argument("pocman: ghost count must be in [0, 4]");
  }
  if (!(params.chase_prob >= 0.0 && params.chase_prob <= 1.0) ||
      !(params.food_prob >= 0.0 && params.food_prob <= 1.0)) {
    throw std::invalid_argument("pocman: probabilities must lie in [0, 1]");
  }
  if (params.power_steps < 0 || params.max_steps < 0 || params.ghost_range < 0 ||
      params.smell_range < 0 || params.hear_range < 0) {
    throw std::invalid_argument("pocman: negative range or step count");
  }
  const auto& starts = ghost_starts();
  for (int i = 0; i < kMaxGhosts; ++i) {
    ghosts_[static_cast<std::size_t>(i)] = starts[static_cast<std::size_t>(i) % starts.size()];
    ghost_dir_[static_cast<std::size_t>(i)] = -1;
  }
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      const char t = tile({x, y});
      if (t == 'o' || (t == '.' && uniform01(rng) < params.food_prob)) food_.set(index({x, y}));
    }
  }
}

std::unique_ptr<PomdpEnvironment> PocmanEnv::clone() const { return std::make_unique<PocmanEnv>(*this); }

std::unique_ptr<PomdpEnvironment> PocmanEnv::sample_initial(Rng& rng) const {
  return std::make_unique<PocmanEnv>(*params_, rng);
}

RewardRange PocmanEnv::reward_range() const {
  const auto& p = *params_;
  const double lo = p.step_reward + std::min(0.0, p.death_reward);
  const double hi = p.step_reward + std::max(0.0, p.food_reward) +
                    std::max(0.0, p.ghost_reward) * p.num_ghosts;
  return {std::min(lo, p.step_reward), std::max(hi, p.step_reward)};
}

void PocmanEnv::set_pocman(Pos p) {
  if (!passable(p)) throw std::out_of_range("pocman: position is a wall");
  pocman_ = p;
}

void PocmanEnv::set_ghost(int i, Pos p) {
  if (i < 0 || i >= num_ghosts()) throw std::out_of_range("pocman: ghost index");
  if (!passable(p)) throw std::out_of_range("pocman: position is a wall");
  ghosts_[static_cast<std::size_t>(i)] = p;
}

void PocmanEnv::set_food(Pos p, bool present) {
  if (!passable(p)) throw std::out_of_range("pocman: position is a wall");
  food_.set(index(p), present);
}

std::uint64_t PocmanEnv::observe() const {
  std::uint64_t obs = 0;
  const int g = num_ghosts();
  for (int d = 0; d < 4; ++d) {
    for (Pos p = next(pocman_, d); passable(p); p = next(p, d)) {
      bool seen = false;
      for (int i = 0; i < g; ++i) seen = seen || ghosts_[static_cast<std::size_t>(i)] == p;
      if (seen) {
        obs |= std::uint64_t{1} << d;
        break;
      }
    }
    if (!passable(next(pocman_, d))) obs |= std::uint64_t{1} << (4 + d);
  }
  const int s = params_->smell_range;
  for (int dy = -s; dy <= s && !(obs >> 8 & 1U); ++dy) {
    for (int dx = -s; dx <= s; ++dx) {
      const Pos p{pocman_.x + dx, pocman_.y + dy};
      if (std::abs(dx) + std::abs(dy) <= s && passable(p) && food_.test(index(p))) {
        obs |= std::uint64_t{1} << 8;
        break;
      }
    }
  }
  for (int i = 0; i < g; ++i) {
    if (manhattan(ghosts_[static_cast<std::size_t>(i)], pocman_) <= params_->hear_range) {
      obs |= std::uint64_t{1} << 9;
      break;
    }
  }
  return obs;
}

void PocmanEnv::move_ghost(int i, Rng& rng) {
  const auto idx = static_cast<std::size_t>(i);
  const Pos from = ghosts_[idx];
  std::array<int, 4> legal{};
  int n_legal = 0;
  for (int d = 0; d < 4; ++d) {
    if (passable(next(from, d))) legal[static_cast<std::size_t>(n_legal++)] = d;
  }
  if (n_legal == 0) return;

  int dir = -1;
  if (manhattan(from, pocman_) <= params_->ghost_range && uniform01(rng) < params_->chase_prob) {
    const bool flee = power_ > 0;
    int best = 0;
    for (int j = 0; j < n_legal; ++j) {
      const int d = legal[static_cast<std::size_t>(j)];
      const int dist = manhattan(next(from, d), pocman_);
      if (dir < 0 || (flee ? dist > best : dist < best)) {
        dir = d;
        best = dist;
      }
    }
  } else {
    const int reverse = ghost_dir_[idx] < 0 ? -1 : (ghost_dir_[idx] + 2) % 4;
    std::array<int, 4> options{};
    int n_options = 0;
    for (int j = 0; j < n_legal; ++j) {
      if (legal[static_cast<std::size_t>(j)] != reverse) {
        options[static_cast<std::size_t>(n_options++)] = legal[static_cast<std::size_t>(j)];
      }
    }
    dir = n_options > 0 ? options[static_cast<std::size_t>(uniform_index(rng, n_options))] : reverse;
  }
  ghosts_[idx] = next(from, dir);
  ghost_dir_[idx] = dir;
}

double PocmanEnv::resolve_collisions() {
  double reward = 0.0;
  const auto& starts = ghost_starts();
  for (int i = 0; i < num_ghosts() && !done_; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!(ghosts_[idx] == pocman_)) continue;
    if (power_ > 0) {
      reward += params_->ghost_reward;
      ghosts_[idx] = starts[idx % starts.size()];
      ghost_dir_[idx] = -1;
    } else {
      reward += params_->death_reward;
      done_ = true;
    }
  }
  return reward;
}

PomdpStepResult PocmanEnv::step(int action, Rng& rng) {
  check_action(action, 4, "pocman");
  if (done_) throw std::logic_error("pocman: step after episode end");
  const auto& p = *params_;
  if (power_ > 0) --power_;
  double reward = p.step_reward;

  const Pos target = next(pocman_, action);
  if (passable(target)) pocman_ = target;
  reward += resolve_collisions();
  if (!done_ && food_.test(index(pocman_))) {
    food_.reset(index(pocman_));
    reward += p.food_reward;
    if (tile(pocman_) == 'o') power_ = p.power_steps;
  }
  if (!done_) {
    for (int i = 0; i < num_ghosts(); ++i) move_ghost(i, rng);
    reward += resolve_collisions();
  }
  if (food_.none()) done_ = true;
  ++steps_;
  if (p.max_steps > 0 && steps_ >= p.max_steps) done_ = true;
  return {reward, observe(), done_};
}

}  // namespace mctslab
