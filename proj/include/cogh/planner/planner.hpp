#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogh/core/hierarchy.hpp"
#include "cogh/grid/world.hpp"

namespace cogh::planner {

using grid::DoorLabel;
using grid::Feature;
using grid::RoomId;

// at(room, feature)
struct SymbolicBelief {
  RoomId room;
  Feature feature;
  friend auto operator<=>(const SymbolicBelief&, const SymbolicBelief&) = default;
};

std::string describe(const SymbolicBelief& b);

// conn(room1, door1, room2, door2) facts, stored in both directions, plus goal_in.
struct Conn {
  RoomId from_room;
  DoorLabel from_door;
  RoomId to_room;
  DoorLabel to_door;
  friend auto operator<=>(const Conn&, const Conn&) = default;
};

struct RoomGraph {
  std::vector<Conn> conns;  // sorted, symmetric
  RoomId goal_in;

  void connect(RoomId a, DoorLabel da, RoomId b, DoorLabel db);
  std::optional<Conn> via(RoomId room, DoorLabel door) const;
  std::vector<RoomId> rooms() const;
  friend bool operator==(const RoomGraph&, const RoomGraph&) = default;
};

std::string describe(const RoomGraph& g);
RoomGraph room_graph(const grid::WorldMap& map);

// Integer costs fed up from the learner. Absent entries are unbounded.
struct CostTables {
  std::map<Feature, long long> ctf;
  std::map<std::pair<Feature, Feature>, long long> cbf;
  friend bool operator==(const CostTables&, const CostTables&) = default;
};

std::string describe(const CostTables& c);

struct Action {
  enum class Kind { Trv, MvGoal };
  Kind kind = Kind::MvGoal;
  DoorLabel door{};

  static Action trv(DoorLabel d) { return {Kind::Trv, d}; }
  static Action mv_goal() { return {Kind::MvGoal, {}}; }
  Feature target() const { return kind == Kind::MvGoal ? Feature::goal() : Feature::of_door(door); }
  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(const Action& a);
inline std::string describe(const Action& a) { return to_string(a); }
std::optional<Action> parse_action(const std::string& s);

// Actions applicable in a belief, in name order.
std::vector<Action> applicable(const SymbolicBelief& b, const RoomGraph& g);

Result<SymbolicBelief> symbolic_transition(const SymbolicBelief& b, const Action& a, const RoomGraph& g);

// ctf(target) from an unknown location, cbf(feature, target) otherwise.
// Nullopt when the table has no entry.
std::optional<long long> action_cost(const SymbolicBelief& b, const Action& a, const CostTables& costs);

struct PlanStep {
  Action action;
  int time = 0;
  long long cost = 0;
  RoomId room;  // room the action is taken in
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  long long total_cost = 0;
  int horizon = 0;

  std::vector<RoomId> rooms() const;  // rooms visited, start first
  friend bool operator==(const Plan&, const Plan&) = default;
};

// Lines `t:<action>:<cost>` then `cost:<int>`.
std::string plan_text(const Plan& p);

// Minimum total cost plan of at most `horizon` actions that reaches the goal.
// Ties: fewer actions, then the lexicographically smaller action names.
Result<Plan> plan_min_cost(const SymbolicBelief& b, const RoomGraph& g, const CostTables& costs, int horizon);

// Policy: the action the plan takes in each room it passes through.
struct PlannerPolicy {
  std::map<RoomId, Action> by_room;
  friend bool operator==(const PlannerPolicy&, const PlannerPolicy&) = default;
};

std::string describe(const PlannerPolicy& p);
ValueSet planner_policy_apply(const PlannerPolicy& p, const SymbolicBelief& b);

struct PlannerState {
  std::optional<CostTables> costs;
  bool costs_changed = false;
  std::optional<Plan> plan;
  std::size_t cursor = 0;
  std::optional<Error> last_error;
  std::size_t replans = 0;

  friend bool operator==(const PlannerState& a, const PlannerState& b) {
    const bool same_err = a.last_error.has_value() == b.last_error.has_value() &&
                          (!a.last_error || (a.last_error->code == b.last_error->code &&
                                             a.last_error->message == b.last_error->message));
    return a.costs == b.costs && a.costs_changed == b.costs_changed && a.plan == b.plan &&
           a.cursor == b.cursor && same_err && a.replans == b.replans;
  }
};

std::string describe(const PlannerState& s);

class PlannerNode final : public NodeInterface {
 public:
  PlannerNode(RoomGraph graph, int horizon, SymbolicBelief start);

  std::string name() const override { return "planner"; }
  Value observation_update(const Value& belief, const ValueSet& observations) const override;
  Value transition_apply(const Value& model, const Value& belief, const ValueSet& context,
                         const ValueSet& actions) const override;
  Value transition_learn(const Value& model, const Value& before, const ValueSet& context,
                         const ValueSet& actions, const Value& after) const override;
  Value utility_absorb(const Value& planning_state, const ValueSet& utilities) const override;
  PlanOutput plan(const Value& policy, const Value& model, const ValueSet& tasks, const Value& planning_state,
                  const Value& belief) const override;
  ValueSet policy_apply(const Value& policy, const Value& belief) const override;

  Value initial_belief() const override { return Value::of(start_); }
  Value initial_policy() const override { return Value::of(PlannerPolicy{}); }
  Value initial_transition_model() const override { return Value::of(graph_); }
  Value initial_planning_state() const override { return Value::of(PlannerState{}); }

  const RoomGraph& graph() const noexcept { return graph_; }
  int horizon() const noexcept { return horizon_; }

 private:
  RoomGraph graph_;
  int horizon_;
  SymbolicBelief start_;
};

std::shared_ptr<const PlannerNode> planner_as_node(RoomGraph graph, int horizon, SymbolicBelief start);

}  // namespace cogh::planner
