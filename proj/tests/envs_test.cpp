#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "mctslab/envs/copy.hpp"
#include "mctslab/envs/frozen_lake.hpp"
#include "mctslab/envs/pocman.hpp"
#include "mctslab/envs/rocksample.hpp"
#include "mctslab/envs/synthetic_tree.hpp"
#include "mctslab/stats.hpp"
#include "oracles.hpp"

using namespace mctslab;

namespace {

template <class Env>
std::vector<double> random_rollout(Env env, std::uint64_t seed, int max_steps) {
  Rng rng(seed);
  std::vector<double> trace;
  for (int t = 0; t < max_steps && !env.done(); ++t) {
    const auto r = env.step(uniform_index(rng, env.num_actions()), rng);
    CHECK(env.reward_range().contains(r.reward));
    trace.push_back(r.reward);
    if constexpr (std::is_base_of_v<Environment, Env>) {
      trace.push_back(static_cast<double>(env.state_key()));
    } else {
      trace.push_back(static_cast<double>(r.observation));
    }
  }
  return trace;
}

}  // namespace

TEST_CASE("synthetic tree structure") {
  const SyntheticTree t2(2, 1, 5);
  CHECK(t2.num_leaves() == 2);
  const double a = t2.leaf_mean(t2.child(0, 0)), b = t2.leaf_mean(t2.child(0, 1));
  CHECK(std::min(a, b) == 0.0);
  CHECK(std::max(a, b) == 1.0);

  const SyntheticTree x(4, 3, 99), y(4, 3, 99), z(4, 3, 100);
  CHECK(x.edge_values() == y.edge_values());
  CHECK_FALSE(x.edge_values() == z.edge_values());
  CHECK(x.num_nodes() == 1 + 4 + 16 + 64);
  const auto ref = oracle::leaf_means_from_edges(x.edge_values(), 4, 3);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(x.leaf_mean(x.first_leaf() + i) == doctest::Approx(ref[i]).epsilon(1e-14));
  for (double e : x.edge_values()) {
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
  }
  const std::vector<int> path = {3, 0, 2};
  CHECK(x.node_at(path) == x.child(x.child(x.child(0, 3), 0), 2));
  CHECK(x.leaf_mean(std::span<const int>(path)) == x.leaf_mean(x.node_at(path)));

  CHECK_THROWS_AS(SyntheticTree(1, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticTree(2, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(SyntheticTree(10, 8, 0), std::invalid_argument);
  const std::vector<int> bad = {4}, too_long = {0, 0, 0, 0};
  CHECK_THROWS_AS(x.node_at(bad), std::invalid_argument);
  CHECK_THROWS_AS(x.node_at(too_long), std::invalid_argument);
}

TEST_CASE("synthetic tree leaf noise") {
  const SyntheticTree t(3, 2, 7);
  const std::vector<int> path = {1, 2};
  Rng rng(1);
  constexpr int n = 100'000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += t.evaluate(path, rng);
  CHECK(std::abs(s / n - t.leaf_mean(std::span<const int>(path))) <= 3.0 * t.sigma() / std::sqrt(n));
}

TEST_CASE("synthetic tree environment") {
  auto tree = std::make_shared<const SyntheticTree>(3, 2, 8);
  SyntheticTreeEnv env(tree);
  Rng rng(2);
  CHECK(env.num_actions() == 3);
  auto r = env.step(1, rng);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
  r = env.step(2, rng);
  CHECK(r.done);
  CHECK(env.done());
  CHECK(env.node() == tree->child(tree->child(0, 1), 2));
  CHECK_THROWS_AS(SyntheticTreeEnv(tree).step(3, rng), std::out_of_range);
}

TEST_CASE("frozen lake slip frequencies") {
  Rng rng(3);
  std::vector<double> counts(3, 0.0);
  constexpr int n = 300'000;
  for (int i = 0; i < n; ++i) {
    const int d = FrozenLake::slip(FrozenLake::kDown, rng);
    REQUIRE((d == FrozenLake::kLeft || d == FrozenLake::kDown || d == FrozenLake::kRight));
    counts[d == FrozenLake::kLeft ? 0 : d == FrozenLake::kDown ? 1 : 2] += 1.0;
  }
  const std::vector<double> expected(3, n / 3.0);
  CHECK(stats::chi_square_pvalue(counts, expected) > 0.01);
}

TEST_CASE("frozen lake dynamics") {
  FrozenLake lake;
  CHECK(lake.rows() == 8);
  CHECK(lake.cols() == 8);
  CHECK(lake.tile(7, 7) == 'G');
  lake.move(FrozenLake::kUp);
  lake.move(FrozenLake::kLeft);
  CHECK(lake.row() == 0);
  CHECK(lake.col() == 0);

  // Left from the corner: up and left clamp, down moves.
  Rng rng(4);
  int stayed = 0;
  for (int i = 0; i < 300; ++i) {
    FrozenLake l;
    l.step(FrozenLake::kLeft, rng);
    stayed += l.row() == 0 && l.col() == 0;
  }
  CHECK(stayed > 150);
  CHECK(stayed < 250);

  FrozenLake tiny({"SG"});
  StepResult r;
  while (!tiny.done()) r = tiny.step(FrozenLake::kRight, rng);
  CHECK(tiny.at_goal());
  CHECK(r.reward == 1.0);
  CHECK(r.done);

  FrozenLake hole({"SHG"});
  while (!hole.done()) r = hole.step(FrozenLake::kRight, rng);
  CHECK(hole.in_hole());
  CHECK(r.reward == 0.0);

  FrozenLake walled({"SF", "FG"}, 5);
  for (int i = 0; i < 5 && !walled.done(); ++i) walled.step(FrozenLake::kUp, rng);
  CHECK(walled.done());

  CHECK_THROWS_AS(FrozenLake({"SX"}), std::invalid_argument);
  CHECK_THROWS_AS(FrozenLake({"SG", "F"}), std::invalid_argument);
  CHECK_THROWS_AS(FrozenLake({"FG"}), std::invalid_argument);
  CHECK_THROWS_AS(lake.step(4, rng), std::out_of_range);
}

TEST_CASE("copy task") {
  CopyEnv env(36, 5);
  CHECK(env.num_actions() == 144);
  CHECK(CopyEnv(50, 5).num_actions() == 200);
  Rng rng(6);
  double ret = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto r = env.step(env.correct_action(), rng);
    ret += r.reward;
    CHECK(r.done == (i == 39));
  }
  CHECK(ret == 40.0);

  CopyEnv wrong(4, std::vector<int>{1, 2, 3});
  const int bad = wrong.encode({1, true, 0});
  const auto r = wrong.step(bad, rng);
  CHECK(r.reward == 0.0);
  CHECK(r.done);

  CopyEnv moves(4, std::vector<int>{1, 2, 3}, 3);
  const int right_no_write = moves.encode({1, false, 0});
  CHECK(moves.decode(right_no_write).move == 1);
  CHECK_FALSE(moves.decode(right_no_write).write);
  moves.step(right_no_write, rng);
  CHECK(moves.read_head() == 1);
  moves.step(moves.encode({0, false, 0}), rng);
  moves.step(moves.encode({0, false, 0}), rng);
  CHECK(moves.read_head() == 0);
  CHECK(moves.done());

  for (int a = 0; a < 16; ++a) CHECK(wrong.encode(wrong.decode(a)) == a);
}

TEST_CASE("rocksample rewards") {
  RocksampleParams p;
  p.n = 4;
  p.k = 1;
  p.rocks = {{1, 2}};
  Rng rng(7);

  RocksampleEnv direct(p, std::uint64_t{0});
  CHECK(direct.num_actions() == 6);
  CHECK(direct.x() == 0);
  CHECK(direct.y() == 2);
  double a = 0.0;
  while (!direct.done()) a += direct.step(RocksampleEnv::kEast, rng).reward;

  RocksampleEnv detour(p, std::uint64_t{0});
  double b = detour.step(RocksampleEnv::kEast, rng).reward;
  b += detour.step(RocksampleEnv::kSample, rng).reward;
  while (!detour.done()) b += detour.step(RocksampleEnv::kEast, rng).reward;
  CHECK(a == 10.0);
  CHECK(b == 0.0);
  CHECK(b < a);

  RocksampleEnv good(p, std::uint64_t{1});
  good.set_position(1, 2);
  CHECK(good.step(RocksampleEnv::kSample, rng).reward == 10.0);
  CHECK_FALSE(good.rock_good(0));
  CHECK(good.step(RocksampleEnv::kSample, rng).reward == -10.0);

  good.set_position(0, 0);
  good.step(RocksampleEnv::kSouth, rng);
  good.step(RocksampleEnv::kWest, rng);
  CHECK(good.x() == 0);
  CHECK(good.y() == 0);
  CHECK_FALSE(good.done());
}

TEST_CASE("rocksample sensor") {
  RocksampleParams p;
  p.n = 7;
  p.k = 1;
  p.rocks = {{3, 3}};
  RocksampleEnv env(p, std::uint64_t{1});
  env.set_position(3, 3);
  CHECK(env.sensor_accuracy(0) == 1.0);
  p.rocks = {{0, 3}};
  p.half_efficiency_distance = 3.0;
  RocksampleEnv far(p, std::uint64_t{1});
  far.set_position(3, 3);
  CHECK(far.sensor_accuracy(0) == doctest::Approx(0.75));
  Rng rng(8);
  int good = 0;
  constexpr int n = 40'000;
  for (int i = 0; i < n; ++i) good += far.step(RocksampleEnv::kCheck, rng).observation == RocksampleEnv::kGood;
  CHECK(std::abs(good / static_cast<double>(n) - 0.75) < 0.01);

  RocksampleParams r;
  r.n = 7;
  r.k = 8;
  r.layout_seed = 3;
  Rng lrng(1);
  const RocksampleEnv laid(r, lrng);
  CHECK(laid.num_actions() == 13);
  CHECK(laid.rocks().size() == 8);
  for (const auto& [x, y] : laid.rocks()) CHECK_FALSE((x == 0 && y == 3));
  CHECK(RocksampleEnv(r, lrng).rocks() == laid.rocks());
}

TEST_CASE("pocman maze") {
  const auto& m = PocmanEnv::maze();
  CHECK(m.size() == 19);
  for (const auto& row : m) CHECK(row.size() == 17);
  int open = 0;
  for (int y = 0; y < 19; ++y) {
    for (int x = 0; x < 17; ++x) open += PocmanEnv::passable({x, y});
  }
  CHECK(open == 187);
}

TEST_CASE("pocman reward accounting") {
  PocmanParams p;
  p.num_ghosts = 0;
  Rng rng(9);
  PocmanEnv env(p, rng);
  env.clear_food();
  env.set_food({7, 14}, true);
  env.set_food({0, 18}, true);
  double ret = 0.0;
  for (int i = 0; i < 3; ++i) ret += env.step(3, rng).reward;
  CHECK(ret == 7.0);
  CHECK(env.pocman() == PocmanEnv::Pos{5, 14});

  PocmanParams g = p;
  g.num_ghosts = 1;
  PocmanEnv eat(g, rng);
  eat.clear_food();
  eat.set_food({0, 18}, true);
  eat.set_ghost(0, {7, 14});
  eat.set_power(5);
  CHECK(eat.step(3, rng).reward == 24.0);
  CHECK_FALSE(eat.done());
  CHECK_FALSE(eat.ghost(0) == PocmanEnv::Pos{7, 14});

  PocmanEnv die(g, rng);
  die.clear_food();
  die.set_food({0, 18}, true);
  die.set_ghost(0, {7, 14});
  const auto r = die.step(3, rng);
  CHECK(r.reward == -101.0);
  CHECK(r.done);

  PocmanEnv clear(p, rng);
  clear.clear_food();
  clear.set_food({9, 14}, true);
  const auto last = clear.step(1, rng);
  CHECK(last.reward == 9.0);
  CHECK(last.done);

  PocmanEnv pill(p, rng);
  pill.clear_food();
  pill.set_food({0, 18}, true);
  pill.set_pocman({1, 14});
  pill.set_food({0, 14}, true);
  CHECK(pill.step(3, rng).reward == 9.0);
  CHECK(pill.power_left() == p.power_steps);
}

TEST_CASE("pocman observations") {
  PocmanParams p;
  p.num_ghosts = 1;
  Rng rng(10);
  PocmanEnv env(p, rng);
  env.clear_food();
  env.set_ghost(0, {0, 0});
  CHECK(env.observe() == ((1u << 4) | (1u << 6)));
  env.set_ghost(0, {12, 14});
  CHECK(env.observe() == ((1u << 1) | (1u << 4) | (1u << 6)));
  env.set_ghost(0, {10, 14});
  CHECK(env.observe() == ((1u << 1) | (1u << 4) | (1u << 6) | (1u << 9)));
  env.set_ghost(0, {0, 0});
  env.set_food({9, 14}, true);
  CHECK(env.observe() == ((1u << 4) | (1u << 6) | (1u << 8)));
  CHECK(env.observe() < 1024);
}

TEST_CASE("environments are reproducible and respect their reward range") {
  auto tree = std::make_shared<const SyntheticTree>(3, 4, 1);
  RocksampleParams rp;
  rp.n = 5;
  rp.k = 3;
  rp.max_steps = 200;
  PocmanParams pp;
  pp.max_steps = 300;
  Rng a(11), b(11);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(random_rollout(SyntheticTreeEnv(tree), seed, 100) == random_rollout(SyntheticTreeEnv(tree), seed, 100));
    CHECK(random_rollout(FrozenLake(), seed, 300) == random_rollout(FrozenLake(), seed, 300));
    CHECK(random_rollout(CopyEnv(8, seed), seed, 300) == random_rollout(CopyEnv(8, seed), seed, 300));
    CHECK(random_rollout(RocksampleEnv(rp, a), seed, 300) == random_rollout(RocksampleEnv(rp, b), seed, 300));
    CHECK(random_rollout(PocmanEnv(pp, a), seed, 300) == random_rollout(PocmanEnv(pp, b), seed, 300));
  }
}
