#include <doctest.h>

#include "../oracles.hpp"
#include "cogh/experiment/experiment.hpp"
#include "cogh/nav/scenario.hpp"

using namespace cogh;
using namespace cogh::nav;
using grid::Direction;
using grid::DoorLabel;
using grid::Feature;
using grid::GridPos;
using grid::RoomId;

namespace {

Feature door(int d) { return Feature::of_door(DoorLabel{static_cast<std::uint8_t>(d)}); }

}  // namespace

TEST_CASE("glue maps between levels") {
  const auto s = canonical_scenario();
  auto w = grid::make_world_state(s.map, RoomId{4}, {8, 7}, 1).value();
  const ValueSet seen = sense_0_1(Value::of(w));
  REQUIRE(seen.size() == 1);
  const auto loc = seen.front().as<Location>();
  CHECK(loc.room == RoomId{4});
  CHECK(loc.pos == GridPos{8, 7});

  const ValueSet sym = sense_1_2(*s.map, Value::of(loc));
  CHECK(sym.front().as<planner::SymbolicBelief>().feature == door(1));
  CHECK(symbolic_at(*s.map, {RoomId{4}, {3, 3}}).feature == Feature::unknown());
  CHECK(symbolic_at(*s.map, {RoomId{3}, {6, 0}}).feature == Feature::goal());

  CHECK(task_2_1(ValueSet::single(planner::Action::trv(DoorLabel{4}))) == ValueSet::single(door(4)));
  CHECK(task_2_1(ValueSet::single(planner::Action::mv_goal())) == ValueSet::single(Feature::goal()));
  CHECK(task_1_0(ValueSet::single(Direction::S)) == ValueSet::single(grid::Command{0, 1}));
  CHECK(sense_0_1(Value::of(3)).empty());
}

TEST_CASE("rounding is half up") {
  CHECK(round_half_up(2.5) == 3);
  CHECK(round_half_up(2.49) == 2);
  CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("cost tables from prior-only Q values") {
  const auto s = canonical_scenario();
  auto q = rl::QState::fresh(projected_space(*s.map), s.learner, 1);
  rl::solve_all(q, rl::TallyModel(q.space));
  const auto c = cost_tables(q, {8, 0});
  // Shortest in-room distances plus the crossing step, from the BFS reference.
  CHECK(c.ctf.at(door(1)) == 8);
  CHECK(c.ctf.at(Feature::goal()) == 2);
  CHECK(c.cbf.at({door(6), door(4)}) == 11);
  CHECK(c.cbf.at({door(3), door(1)}) == 7);
  CHECK(c.cbf.at({door(1), Feature::goal()}) == 9);
  CHECK(util_1_2(Value::of(q)).empty());  // no cached cell yet
  q.cell = GridPos{8, 0};
  CHECK(util_1_2(Value::of(q)) == ValueSet::single(c));
}

TEST_CASE("an untrained hierarchy already has a plan from the start") {
  const auto s = canonical_scenario();
  auto ah = build_hierarchy(s).value();
  auto p = plan_from_start(ah, s);
  REQUIRE(p);
  CHECK(p->rooms().front() == RoomId{4});
  CHECK(p->rooms().back() == RoomId{3});
}

TEST_CASE("horizon 1 cannot reach the goal room") {
  auto s = canonical_scenario();
  s.horizon = 1;
  auto ah = build_hierarchy(s).value();
  auto p = plan_from_start(ah, s);
  REQUIRE_FALSE(p);
  CHECK(p.error().code == ErrorCode::NoPlan);
}

TEST_CASE("deterministic motion reaches the goal by a shortest path") {
  auto s = canonical_scenario();
  s.motion.p_intended = 1.0;
  auto t = experiment::train(s, 200);
  REQUIRE(t);
  CHECK(t->converged);
  auto ev = run_episode(t->hierarchy, s, s.max_steps, rl::Mode::Evaluation);
  REQUIRE(ev);
  CHECK(ev->reached);
  CHECK(ev->steps == static_cast<std::size_t>(oracle::bfs_world(*s.map, s.start_room, s.start)));
  CHECK(ev->steps == 35);
  CHECK(ev->rooms == std::vector<RoomId>{RoomId{4}, RoomId{1}, RoomId{2}, RoomId{3}});
  CHECK(ev->planned_rooms == ev->rooms);
}

TEST_CASE("episodes are reproducible and respect the step cap") {
  const auto s = canonical_scenario();
  auto ah = build_hierarchy(s).value();
  auto a = run_episode(ah, s, s.max_steps, rl::Mode::Learning).value();
  auto b = run_episode(ah, s, s.max_steps, rl::Mode::Learning).value();
  CHECK(a.steps == b.steps);
  CHECK(a.final == b.final);
  auto capped = run_episode(ah, s, 5, rl::Mode::Learning, {true}).value();
  CHECK(capped.steps == 5);
  CHECK_FALSE(capped.reached);
  REQUIRE(capped.trajectory.size() == 6);
  CHECK(capped.trajectory.front().location.pos == s.start);
  for (std::size_t k = 1; k < capped.trajectory.size(); ++k) CHECK(capped.trajectory[k].command.has_value());
}

TEST_CASE("reset puts the robot back at the start") {
  const auto s = canonical_scenario();
  auto ah = build_hierarchy(s).value();
  auto ev = run_episode(ah, s, 20, rl::Mode::Learning).value();
  auto reset = reset_episode(ev.final, s, rl::Mode::Evaluation);
  CHECK(world_of(reset).room == s.start_room);
  CHECK(world_of(reset).pos == s.start);
  CHECK(learner_state(reset).mode == rl::Mode::Evaluation);
  CHECK_FALSE(planner_state(reset).plan);
  // Learned counts survive the reset.
  CHECK(learner_model(reset) == learner_model(ev.final));
}

TEST_CASE("flat agent state space") {
  const auto s = canonical_scenario();
  FlatAgent agent(s.map, s.learner, 1);
  CHECK(agent.state_count() == 450);
  const Location loc{RoomId{2}, {3, 4}};
  const auto st = agent.state_of(loc);
  REQUIRE(st);
  CHECK(agent.location_of(*st) == loc);
  CHECK_FALSE(agent.state_of({RoomId{2}, {9, 0}}));
}

TEST_CASE("flat agent with deterministic motion learns a shortest path") {
  auto s = canonical_scenario();
  s.motion.p_intended = 1.0;
  FlatAgent agent(s.map, s.learner, 3);
  grid::WorldState world = grid::make_world_state(s.map, s.start_room, s.start, 5).value();
  for (int e = 0; e < 60; ++e) run_flat_episode(agent, world, s, s.max_steps, rl::Mode::Learning);
  const auto ev = run_flat_episode(agent, world, s, s.max_steps, rl::Mode::Evaluation);
  CHECK(ev.reached);
  CHECK(ev.steps == 35);
  // The prior pseudo-count keeps a little optimism about unexplored exits.
  CHECK(agent.value({s.start_room, s.start}) <= 35.0);
}
