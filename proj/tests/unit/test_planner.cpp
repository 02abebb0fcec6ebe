#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "cogh/planner/planner.hpp"

using namespace cogh;
using namespace cogh::planner;
using grid::DoorLabel;
using grid::Feature;
using grid::RoomId;

namespace {

Feature door(int d) { return Feature::of_door(DoorLabel{static_cast<std::uint8_t>(d)}); }
RoomId room(int r) { return RoomId{static_cast<std::uint8_t>(r)}; }

// Every ctf entry and every cbf entry set to `v`.
CostTables flat_costs(long long v) {
  CostTables c;
  std::vector<Feature> fs{Feature::goal()};
  for (int d = 1; d <= 6; ++d) fs.push_back(door(d));
  for (const Feature& a : fs) {
    c.ctf[a] = v;
    for (const Feature& b : fs) c.cbf[{a, b}] = v;
  }
  return c;
}

}  // namespace

TEST_CASE("room graph of the canonical map") {
  const auto g = room_graph(grid::canonical_map());
  CHECK(g.conns.size() == 10);
  CHECK(g.goal_in == room(3));
  auto c = g.via(room(4), DoorLabel{1});
  REQUIRE(c);
  CHECK(c->to_room == room(1));
  CHECK(c->to_door == DoorLabel{6});
  CHECK_FALSE(g.via(room(4), DoorLabel{2}));
  CHECK(g.rooms().size() == 5);
}

TEST_CASE("applicable actions and symbolic transitions") {
  const auto g = room_graph(grid::canonical_map());
  const SymbolicBelief start{room(4), Feature::unknown()};
  const auto acts = applicable(start, g);
  REQUIRE(acts.size() == 2);
  CHECK(to_string(acts[0]) == "trv(d1)");
  CHECK(to_string(acts[1]) == "trv(d5)");
  auto next = symbolic_transition(start, Action::trv(DoorLabel{1}), g);
  REQUIRE(next);
  CHECK(next->room == room(1));
  CHECK(next->feature == door(6));
  CHECK_FALSE(symbolic_transition(start, Action::mv_goal(), g));
  const auto in_goal_room = applicable({room(3), door(1)}, g);
  CHECK(std::find(in_goal_room.begin(), in_goal_room.end(), Action::mv_goal()) != in_goal_room.end());
  CHECK(parse_action("trv(d4)") == Action::trv(DoorLabel{4}));
  CHECK(parse_action("mv_goal") == Action::mv_goal());
  CHECK_FALSE(parse_action("fly"));
}

TEST_CASE("action costs read ctf from an unknown location and cbf otherwise") {
  CostTables c;
  c.ctf[door(1)] = 7;
  c.cbf[{door(6), door(4)}] = 11;
  CHECK(action_cost({room(4), Feature::unknown()}, Action::trv(DoorLabel{1}), c) == 7);
  CHECK(action_cost({room(1), door(6)}, Action::trv(DoorLabel{4}), c) == 11);
  CHECK_FALSE(action_cost({room(1), door(6)}, Action::trv(DoorLabel{6}), c));
}

TEST_CASE("uniform costs pick the route with fewer actions") {
  const auto g = room_graph(grid::canonical_map());
  auto p = plan_min_cost({room(4), Feature::unknown()}, g, flat_costs(10), 10);
  REQUIRE(p);
  CHECK(p->total_cost == 30);
  CHECK(p->rooms() == std::vector<RoomId>{room(4), room(5), room(3)});
  CHECK(plan_text(*p) == "0:trv(d5):10\n1:trv(d2):10\n2:mv_goal:10\ncost:30\n");
}

TEST_CASE("cheap doors make the longer route win") {
  const auto g = room_graph(grid::canonical_map());
  auto c = flat_costs(10);
  c.ctf[door(1)] = 1;
  c.cbf[{door(6), door(4)}] = 1;
  c.cbf[{door(3), door(1)}] = 1;
  auto p = plan_min_cost({room(4), Feature::unknown()}, g, c, 10);
  REQUIRE(p);
  CHECK(p->total_cost == 13);
  CHECK(p->rooms() == std::vector<RoomId>{room(4), room(1), room(2), room(3)});
}

TEST_CASE("a short horizon leaves no plan") {
  const auto g = room_graph(grid::canonical_map());
  auto p = plan_min_cost({room(4), Feature::unknown()}, g, flat_costs(1), 1);
  REQUIRE_FALSE(p);
  CHECK(p.error().code == ErrorCode::NoPlan);
  CHECK(plan_min_cost({room(4), Feature::unknown()}, g, flat_costs(1), 3));
}

TEST_CASE("missing costs are impassable") {
  const auto g = room_graph(grid::canonical_map());
  CostTables c = flat_costs(5);
  c.ctf.erase(door(1));
  c.ctf.erase(door(5));
  CHECK_FALSE(plan_min_cost({room(4), Feature::unknown()}, g, c, 10));
}

TEST_CASE("already at the goal") {
  const auto g = room_graph(grid::canonical_map());
  auto p = plan_min_cost({room(3), Feature::goal()}, g, flat_costs(5), 10);
  REQUIRE(p);
  CHECK(p->steps.empty());
  CHECK(p->total_cost == 0);
}

TEST_CASE("plan_min_cost matches exhaustive search on random tables") {
  const auto map = grid::canonical_map();
  const auto g = room_graph(map);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> cost(0, 20);
  for (int t = 0; t < 20; ++t) {
    CostTables c = flat_costs(0);
    for (auto& [k, v] : c.ctf) v = cost(rng);
    for (auto& [k, v] : c.cbf) v = cost(rng);
    for (RoomId r : map.room_ids())
      for (int h : {1, 2, 3, 4, 10}) {
        const SymbolicBelief b{r, Feature::unknown()};
        auto p = plan_min_cost(b, g, c, h);
        auto want = oracle::brute_force_plan(map, c, {r, Feature::unknown()}, h);
        REQUIRE(static_cast<bool>(p) == want.has_value());
        if (p) {
          CHECK(p->total_cost == *want);
          CHECK(static_cast<int>(p->steps.size()) <= h);
        }
      }
  }
}

TEST_CASE("the planner node replans only when needed") {
  const auto g = room_graph(grid::canonical_map());
  PlannerNode node(g, 10, {room(4), Feature::unknown()});
  Value ps = node.initial_planning_state();
  Value policy = node.initial_policy();
  const Value model = node.initial_transition_model();
  const Value belief = node.initial_belief();

  // No costs yet: nothing to do.
  auto out = node.plan(policy, model, {}, ps, belief);
  CHECK(node.policy_apply(out.policy, belief).empty());

  ps = node.utility_absorb(ps, ValueSet::single(flat_costs(10)));
  out = node.plan(policy, model, {}, ps, belief);
  CHECK(out.planning_state.as<PlannerState>().replans == 1);
  CHECK(node.policy_apply(out.policy, belief) == ValueSet::single(Action::trv(DoorLabel{5})));

  // Same costs, same belief: no replan, identical output.
  const Value same = node.utility_absorb(out.planning_state, ValueSet::single(flat_costs(10)));
  auto again = node.plan(out.policy, model, {}, same, belief);
  CHECK(again.planning_state.as<PlannerState>().replans == 1);
  CHECK(again.policy == out.policy);

  // Off the plan (r1 is not on r4-r5-r3): replan.
  const Value elsewhere = Value::of(SymbolicBelief{room(1), door(6)});
  auto moved = node.plan(out.policy, model, {}, out.planning_state, elsewhere);
  CHECK(moved.planning_state.as<PlannerState>().replans == 2);
  CHECK(node.policy_apply(moved.policy, elsewhere) == ValueSet::single(Action::trv(DoorLabel{4})));
}
