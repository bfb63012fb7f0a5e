#include "mctslab/envs/frozen_lake.hpp"

#include <stdexcept>

namespace mctslab {

const std::vector<std::string>& FrozenLake::canonical_map() {
  static const std::vector<std::string> map = {
      "SFFFFFFF", "FFFFFFFF", "FFFHFFFF", "FFFFFHFF",
      "FFFHFFFF", "FHHFFFHF", "FHFFHFHF", "FFFHFFFG",
  };
  return map;
}

FrozenLake::FrozenLake(std::vector<std::string> map, int step_limit) : step_limit_(step_limit) {
  if (map.empty() || map[0].empty()) throw std::invalid_argument("frozenlake: empty map");
  if (step_limit < 1) throw std::invalid_argument("frozenlake: step limit must be >= 1");
  int starts = 0;
  int goals = 0;
  for (std::size_t r = 0; r < map.size(); ++r) {
    if (map[r].size() != map[0].size()) throw std::invalid_argument("frozenlake: ragged map");
    for (std::size_t c = 0; c < map[r].size(); ++c) {
      switch (map[r][c]) {
        case 'S':
          ++starts;
          row_ = static_cast<int>(r);
          col_ = static_cast<int>(c);
          break;
        case 'G': ++goals; break;
        case 'F':
        case 'H': break;
        default: throw std::invalid_argument(std::string("frozenlake: unknown tile '") + map[r][c] + "'");
      }
    }
  }
  if (starts != 1) throw std::invalid_argument("frozenlake: map needs exactly one start");
  if (goals < 1) throw std::invalid_argument("frozenlake: map needs a goal");
  map_ = std::make_shared<const std::vector<std::string>>(std::move(map));
}

std::unique_ptr<Environment> FrozenLake::clone() const { return std::make_unique<FrozenLake>(*this); }

int FrozenLake::rows() const { return static_cast<int>(map_->size()); }
int FrozenLake::cols() const { return static_cast<int>((*map_)[0].size()); }

char FrozenLake::tile(int r, int c) const {
  return (*map_).at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
}

void FrozenLake::set_position(int r, int c) {
  if (r < 0 || r >= rows() || c < 0 || c >= cols()) throw std::out_of_range("frozenlake: position");
  row_ = r;
  col_ = c;
}

bool FrozenLake::done() const { return at_goal() || in_hole() || steps_ >= step_limit_; }

std::uint64_t FrozenLake::state_key() const {
  return static_cast<std::uint64_t>(row_ * cols() + col_);
}

int FrozenLake::slip(int action, Rng& rng) {
  return (action + 3 + uniform_index(rng, 3)) % 4;
}

void FrozenLake::move(int direction) {
  switch (direction) {
    case kLeft: col_ = col_ > 0 ? col_ - 1 : col_; break;
    case kDown: row_ = row_ + 1 < rows() ? row_ + 1 : row_; break;
    case kRight: col_ = col_ + 1 < cols() ? col_ + 1 : col_; break;
    case kUp: row_ = row_ > 0 ? row_ - 1 : row_; break;
    default: throw std::out_of_range("frozenlake: bad direction");
  }
}

StepResult FrozenLake::step(int action, Rng& rng) {
  check_action(action, 4, "frozenlake");
  if (done()) throw std::logic_error("frozenlake: step after episode end");
  move(slip(action, rng));
  ++steps_;
  return {at_goal() ? 1.0 : 0.0, done()};
}

}  // namespace mctslab
