#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogh/core/process.hpp"
#include "cogh/grid/world.hpp"
#include "cogh/planner/planner.hpp"
#include "cogh/rl/learner.hpp"

namespace cogh::nav {

using grid::GridPos;
using grid::Location;
using grid::RoomId;

inline constexpr NodeId kWorld{0};
inline constexpr NodeId kLearner{1};
inline constexpr NodeId kPlanner{2};

struct Scenario {
  std::shared_ptr<const grid::WorldMap> map;
  grid::MotionModel motion;
  RoomId start_room{};
  GridPos start{};
  rl::LearnerParams learner;
  int horizon = 10;
  std::uint64_t seed = 1;
  int max_steps = 1000;  // per-episode cap
  // Sensing edges (lower, upper) between node ids; the canonical wiring is
  // N0 -> N1 -> N2.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> wiring = {{0, 1}, {1, 2}};

  friend bool operator==(const Scenario& a, const Scenario& b) {
    const bool same_map = a.map == b.map || (a.map && b.map && *a.map == *b.map);
    return same_map && a.motion.p_intended == b.motion.p_intended && a.start_room == b.start_room &&
           a.start == b.start && a.learner == b.learner && a.horizon == b.horizon && a.seed == b.seed &&
           a.max_steps == b.max_steps && a.wiring == b.wiring;
  }
};

Scenario canonical_scenario();

// Glue between the levels.
ValueSet sense_0_1(const Value& world_belief);
ValueSet sense_1_2(const grid::WorldMap& map, const Value& grid_belief);
ValueSet util_1_2(const Value& learner_state);
ValueSet task_2_1(const ValueSet& planner_actions);
ValueSet task_1_0(const ValueSet& learner_actions);

long long round_half_up(double v);
// Cost tables from the learner's Q-values at `cell`.
planner::CostTables cost_tables(const rl::QState& q, GridPos cell);

rl::SpacePtr projected_space(const grid::WorldMap& map);
planner::SymbolicBelief symbolic_at(const grid::WorldMap& map, const Location& loc);

Result<std::shared_ptr<const Hierarchy>> build_wiring(const Scenario& s);
Result<ActiveHierarchy> build_hierarchy(const Scenario& s);

const grid::WorldState& world_of(const ActiveHierarchy& ah);
const rl::QState& learner_state(const ActiveHierarchy& ah);
const rl::TallyModel& learner_model(const ActiveHierarchy& ah);
const planner::PlannerState& planner_state(const ActiveHierarchy& ah);

// Puts the robot back at the start and resynchronises the upper levels:
// beliefs follow the robot, policies go back to their initial values, the
// learner's cached cell becomes the start and the planner drops its plan
// (keeping its cost tables). `mode` selects exploration.
ActiveHierarchy reset_episode(const ActiveHierarchy& ah, const Scenario& s, rl::Mode mode);

struct EpisodeResult {
  std::size_t steps = 0;
  bool reached = false;
  ActiveHierarchy final;
  std::vector<RoomId> rooms;                 // rooms the robot passed through
  std::optional<planner::Plan> first_plan;  // first plan of the episode
  // Start room, then for each room change the room the plan in force at
  // that cycle had next (the room left again when the plan had none).
  std::vector<RoomId> planned_rooms;
  std::vector<grid::TrajectoryRow> trajectory;
};

struct EpisodeOptions {
  bool record_trajectory = false;
};

Result<EpisodeResult> run_episode(const ActiveHierarchy& ah, const Scenario& s, int max_steps, rl::Mode mode,
                                  EpisodeOptions options = {});

// Plan N2 would commit to with the robot at the start: one utility and one
// action update on N2 after a reset.
Result<planner::Plan> plan_from_start(const ActiveHierarchy& ah, const Scenario& s);

// The undecomposed baseline: one goal-task table over every (room, cell)
// state. It knows the room template but not how doors connect; an untried
// outward step through a door-label cell is assumed to reach the goal.
class FlatAgent {
 public:
  FlatAgent(std::shared_ptr<const grid::WorldMap> map, rl::LearnerParams params, std::uint64_t seed);

  int state_count() const noexcept { return static_cast<int>(rooms_.size()) * cells_; }
  std::optional<int> state_of(const Location& loc) const;
  Location location_of(int state) const;

  grid::Direction choose(const Location& loc, rl::Mode mode);
  void observe(const Location& from, grid::Direction a, const Location& to);
  void solve();
  double value(int state) const;
  double value(const Location& loc) const;
  const std::vector<double>& q() const noexcept { return q_; }

 private:
  static constexpr int kOptimisticExit = -1;
  std::vector<std::pair<int, double>> probs(int state, grid::Direction a) const;
  int prior(int state, grid::Direction a) const;

  std::shared_ptr<const grid::WorldMap> map_;
  grid::RoomTemplate template_;
  rl::SpacePtr space_;
  std::vector<RoomId> rooms_;
  int cells_ = 0;
  int goal_state_ = -1;
  rl::LearnerParams params_;
  std::mt19937_64 rng_;
  std::vector<double> q_;
  // Successor tallies per (state, action).
  std::vector<std::vector<std::pair<int, std::uint32_t>>> counts_;
  std::optional<std::pair<int, grid::Direction>> last_;  // for one-step mode
};

struct FlatEpisode {
  std::size_t steps = 0;
  bool reached = false;
};

FlatEpisode run_flat_episode(FlatAgent& agent, grid::WorldState& world, const Scenario& s, int max_steps,
                             rl::Mode mode);

}  // namespace cogh::nav
