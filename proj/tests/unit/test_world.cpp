#include <doctest.h>

#include <algorithm>
#include <random>

#include "../oracles.hpp"
#include "cogh/grid/world.hpp"

using namespace cogh;
using namespace cogh::grid;

TEST_CASE("the canonical map satisfies every invariant") {
  const WorldMap m = canonical_map();
  CHECK(check_map(m).empty());
  CHECK(m.room_ids().size() == 5);
  CHECK(m.doorways().size() == 5);
  for (RoomId r : m.room_ids()) CHECK(m.free_cell_count(r) == kCellsPerRoom);
  auto links = m.room_links();
  auto want = required_room_links();
  auto norm = [](std::vector<std::pair<RoomId, RoomId>> v) {
    for (auto& [a, b] : v)
      if (b < a) std::swap(a, b);
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(norm(links) == norm(want));
  CHECK(m.goal_room() == RoomId{3});
  CHECK(m.projected_template().traversable_count() == 90);
}

TEST_CASE("door crossing lands on the partner door cell") {
  const WorldMap m = canonical_map();
  // r4.d1 sits at (8,7) with the wall to the east; its partner is r1.d6.
  CHECK(m.door_pos(RoomId{4}, DoorLabel{1}) == GridPos{8, 7});
  CHECK(m.outward(RoomId{4}, {8, 7}) == Direction::E);
  const Location to = move(m, {RoomId{4}, {8, 7}}, Direction::E);
  CHECK(to.room == RoomId{1});
  CHECK(to.pos == *m.door_pos(RoomId{1}, DoorLabel{6}));
  // Any other direction from a door cell is an ordinary move.
  CHECK(move(m, {RoomId{4}, {8, 7}}, Direction::W).pos == GridPos{7, 7});
}

TEST_CASE("walls block and the robot stays put") {
  const WorldMap m = canonical_map();
  CHECK(move(m, {RoomId{2}, {0, 0}}, Direction::N).pos == GridPos{0, 0});
  CHECK(move(m, {RoomId{2}, {0, 0}}, Direction::W).pos == GridPos{0, 0});
  CHECK(move(m, {RoomId{2}, {8, 3}}, Direction::E).pos == GridPos{8, 3});
}

TEST_CASE("move agrees with an independent reimplementation on every cell") {
  const WorldMap m = canonical_map();
  int n = 0;
  for (RoomId r : m.room_ids())
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) {
        if (!m.traversable(r, {x, y})) continue;
        for (int d = 0; d < 4; ++d) {
          const Location got = move(m, {r, {x, y}}, kDirections[d]);
          const auto want = oracle::land(m, r, {x, y}, d);
          CHECK(got.room == want.first);
          CHECK(got.pos == want.second);
          ++n;
        }
      }
  CHECK(n == 5 * 90 * 4);
}

TEST_CASE("slip directions follow the motion model") {
  std::mt19937_64 rng(12);
  MotionModel motion{0.8};
  int intended = 0, left = 0, right = 0, reverse = 0;
  constexpr int kDraws = 40000;
  for (int k = 0; k < kDraws; ++k) {
    const Direction c = kDirections[k % 4];
    const Direction a = sample_direction(c, motion, rng);
    if (a == c) ++intended;
    else if (a == left_of(c)) ++left;
    else if (a == right_of(c)) ++right;
    else ++reverse;
  }
  CHECK(reverse == 0);
  CHECK(std::abs(intended / double(kDraws) - 0.8) < 0.01);
  CHECK(std::abs(left / double(kDraws) - 0.1) < 0.01);
  CHECK(std::abs(right / double(kDraws) - 0.1) < 0.01);
}

TEST_CASE("deterministic and fully lateral motion") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) CHECK(sample_direction(Direction::N, MotionModel{1.0}, rng) == Direction::N);
  for (int k = 0; k < 200; ++k) CHECK(sample_direction(Direction::N, MotionModel{0.0}, rng) != Direction::N);
  CHECK(left_of(Direction::N) == Direction::W);
  CHECK(right_of(Direction::N) == Direction::E);
  CHECK(opposite(Direction::E) == Direction::W);
}

TEST_CASE("step_world counts steps and records both directions") {
  auto map = std::make_shared<const WorldMap>(canonical_map());
  auto w = make_world_state(map, RoomId{4}, canonical_start(), 1);
  REQUIRE(w);
  CHECK(w->steps == 0);
  auto next = step_world(*w, MotionModel{1.0}, command_of(Direction::S));
  REQUIRE(next);
  CHECK(next->steps == 1);
  CHECK(next->last_command == Direction::S);
  CHECK(next->last_actual == Direction::S);
  CHECK(next->pos == GridPos{canonical_start().x, canonical_start().y + 1});
  CHECK_FALSE(step_world(*w, MotionModel{1.0}, Command{2, 0}));
  CHECK_FALSE(step_world(*w, MotionModel{1.0}, Command{0, 0}));
}

TEST_CASE("a start on a wall is refused") {
  auto map = std::make_shared<const WorldMap>(canonical_map());
  CHECK_FALSE(make_world_state(map, RoomId{4}, {9, 0}, 1));
  CHECK_FALSE(make_world_state(map, RoomId{9}, {0, 0}, 1));
}

TEST_CASE("shortest and expected path lengths from the start") {
  const WorldMap m = canonical_map();
  const RoomId start_room = kCanonicalStartRoom;
  const GridPos start = canonical_start();
  // Values computed by the reference BFS and value iteration, then frozen.
  CHECK(oracle::bfs_world(m, start_room, start) == 35);
  const auto v8 = oracle::true_vi(m, 0.8);
  const auto v4 = oracle::true_vi(m, 0.4);
  CHECK(v8.at(start_room, start) == doctest::Approx(46.97).epsilon(0.0002));
  CHECK(v4.at(start_room, start) == doctest::Approx(122.06).epsilon(0.0002));
  const auto route_a = oracle::doors_outside(m, {RoomId{4}, RoomId{1}, RoomId{2}, RoomId{3}});
  const auto route_b = oracle::doors_outside(m, {RoomId{4}, RoomId{5}, RoomId{3}});
  CHECK(oracle::true_vi(m, 0.8, route_a).at(start_room, start) <
        oracle::true_vi(m, 0.8, route_b).at(start_room, start));
  CHECK(oracle::true_vi(m, 0.4, route_b).at(start_room, start) <
        oracle::true_vi(m, 0.4, route_a).at(start_room, start));
}

TEST_CASE("check_map catches a broken room") {
  WorldMap m = canonical_map();
  RoomGrid g = m.rooms().at(RoomId{2});
  g.cells[static_cast<std::size_t>(3 * m.width() + 3)] = CellKind::Wall;
  m.add_room(RoomId{2}, g);
  CHECK_FALSE(check_map(m).empty());
}

TEST_CASE("trajectory CSV") {
  std::vector<TrajectoryRow> rows{{0, {RoomId{4}, {8, 0}}, std::nullopt, std::nullopt},
                                  {1, {RoomId{4}, {7, 0}}, Direction::S, Direction::W}};
  CHECK(trajectory_csv(rows) == "t,room,x,y,command,actual_dir\n0,r4,8,0,-,-\n1,r4,7,0,S,W\n");
}
