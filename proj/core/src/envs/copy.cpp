#include "mctslab/envs/copy.hpp"

#include <stdexcept>

namespace mctslab {

namespace {

std::vector<int> random_band(int alphabet, int length, std::uint64_t seed) {
  if (alphabet < 1) throw std::invalid_argument("copy: alphabet must be >= 1");
  if (length < 1) throw std::invalid_argument("copy: band length must be >= 1");
  Rng rng(seed);
  std::vector<int> band(static_cast<std::size_t>(length));
  for (int& c : band) c = uniform_index(rng, alphabet);
  return band;
}

}  // namespace

CopyEnv::CopyEnv(int alphabet, std::uint64_t seed, int band_length, int time_limit)
    : CopyEnv(alphabet, random_band(alphabet, band_length, seed), time_limit) {}

CopyEnv::CopyEnv(int alphabet, std::vector<int> band, int time_limit)
    : alphabet_(alphabet), time_limit_(time_limit) {
  if (alphabet < 1) throw std::invalid_argument("copy: alphabet must be >= 1");
  if (band.empty()) throw std::invalid_argument("copy: empty band");
  if (time_limit < 1) throw std::invalid_argument("copy: time limit must be >= 1");
  for (int c : band) {
    if (c < 0 || c >= alphabet) throw std::invalid_argument("copy: band character outside alphabet");
  }
  band_ = std::make_shared<const std::vector<int>>(std::move(band));
}

std::unique_ptr<Environment> CopyEnv::clone() const { return std::make_unique<CopyEnv>(*this); }

std::uint64_t CopyEnv::state_key() const {
  return (static_cast<std::uint64_t>(read_) << 40) | (static_cast<std::uint64_t>(written_) << 20) |
         static_cast<std::uint64_t>(time_);
}

int CopyEnv::encode(const Action& a) const {
  if (a.move < 0 || a.move > 1 || a.character < 0 || a.character >= alphabet_) {
    throw std::out_of_range("copy: bad action fields");
  }
  return (a.move * 2 + (a.write ? 1 : 0)) * alphabet_ + a.character;
}

CopyEnv::Action CopyEnv::decode(int action) const {
  check_action(action, num_actions(), "copy");
  const int head = action / alphabet_;
  return {head / 2, head % 2 == 1, action % alphabet_};
}

int CopyEnv::correct_action() const {
  const int c = written_ < band_length() ? (*band_)[static_cast<std::size_t>(written_)] : 0;
  return encode({1, true, c});
}

StepResult CopyEnv::step(int action, Rng&) {
  const Action a = decode(action);
  if (done_) throw std::logic_error("copy: step after episode end");
  ++time_;
  read_ = a.move == 0 ? (read_ > 0 ? read_ - 1 : 0) : (read_ + 1 < band_length() ? read_ + 1 : read_);
  double reward = 0.0;
  if (a.write) {
    if (a.character == (*band_)[static_cast<std::size_t>(written_)]) {
      reward = 1.0;
      ++written_;
      if (written_ == band_length()) done_ = true;
    } else {
      done_ = true;
    }
  }
  if (time_ >= time_limit_) done_ = true;
  return {reward, done_};
}

}  // namespace mctslab
