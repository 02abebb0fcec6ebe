#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cogh/core/hierarchy.hpp"
#include "cogh/grid/world.hpp"

namespace cogh::rl {

using grid::Direction;
using grid::DoorLabel;
using grid::Feature;
using grid::GridPos;
using grid::RoomId;
using grid::RoomTemplate;

// N1's belief: the room and the room-relative cell.
using GridBelief = grid::Location;

enum class Mode { Learning, Evaluation };

// The room-relative state space shared by every room. States 0..cells-1 are
// the traversable template cells in row-major order; after them comes one
// absorbing exit state per door label (the position just past the door).
class ProjectedSpace {
 public:
  // `room_doors` lists the door labels each room really has. Left empty, every
  // room is assumed to have all of them.
  explicit ProjectedSpace(RoomTemplate room, std::map<RoomId, std::set<DoorLabel>> room_doors = {});

  const RoomTemplate& room() const noexcept { return room_; }
  int cell_count() const noexcept { return static_cast<int>(cells_.size()); }
  int state_count() const noexcept { return cell_count() + static_cast<int>(exits_.size()); }

  std::optional<int> index_of(GridPos p) const;
  GridPos position(int state) const;  // exits report the cell past the door
  bool is_exit(int state) const noexcept { return state >= cell_count(); }
  DoorLabel exit_label(int state) const { return exits_.at(static_cast<std::size_t>(state - cell_count())).label; }
  std::optional<int> exit_of_label(DoorLabel d) const;
  // Exit reached by stepping outward from a door cell, if `cell` is one.
  std::optional<int> exit_from(int cell) const;
  std::optional<Direction> outward_of(int cell) const;
  std::optional<int> neighbour(int cell, Direction d) const;
  // False for a door-label cell in a room that lacks that door: there it is a
  // plain rim cell and its moves say nothing about the door.
  bool informative(RoomId room, int cell) const;

  // Task order: door labels ascending, then goal.
  const std::vector<Feature>& tasks() const noexcept { return tasks_; }
  std::optional<int> task_index(const Feature& f) const;
  // Cell where a feature sits in the template.
  std::optional<int> feature_cell(const Feature& f) const;

  // Successor assumed for an untried (cell, action): the intended neighbour if
  // traversable, the exit if stepping outward from a door cell, else stay.
  int prior_successor(int cell, Direction a) const;

  // Successors of a cell are confined to six slots: stay, the four
  // neighbours (N, S, E, W) and the cell's exit.
  static constexpr int kSlots = 6;
  std::optional<int> slot_state(int cell, int slot) const;
  std::optional<int> slot_of(int cell, int successor) const;

 private:
  struct Exit {
    DoorLabel label;
    GridPos beyond;
    int door_cell;
  };
  RoomTemplate room_;
  std::vector<GridPos> cells_;
  std::vector<int> index_;  // width*height -> cell index or -1
  std::vector<Exit> exits_;
  std::vector<Feature> tasks_;
  std::map<RoomId, std::set<DoorLabel>> room_doors_;
};

using SpacePtr = std::shared_ptr<const ProjectedSpace>;

inline int action_index(Direction d) { return static_cast<int>(d); }

// Counts of (cell, action, successor) over the projected space.
class TallyModel {
 public:
  TallyModel() = default;
  explicit TallyModel(SpacePtr space);

  const SpacePtr& space() const noexcept { return space_; }
  std::uint32_t count(int cell, Direction a, int successor) const;
  std::uint32_t total(int cell, Direction a) const;
  // Returns false when the successor is not adjacent to the cell.
  bool add(int cell, Direction a, int successor, std::uint32_t n = 1);

  friend bool operator==(const TallyModel& a, const TallyModel& b) { return a.counts_ == b.counts_; }

 private:
  std::size_t offset(int cell, Direction a) const {
    return (static_cast<std::size_t>(cell) * 4 + static_cast<std::size_t>(action_index(a))) * ProjectedSpace::kSlots;
  }
  SpacePtr space_;
  std::vector<std::uint32_t> counts_;
};

std::string describe(const TallyModel& m);

// Weight of the prior successor in the successor estimate. Without it a single
// unlucky sample (a slip off a door cell, say) rules a door out for good.
inline constexpr double kPriorPseudoCount = 1.0;

// Successor distribution for (cell, action), ordered by state index: the
// tallies plus kPriorPseudoCount on the prior successor.
std::vector<std::pair<int, double>> empirical_probs(const TallyModel& model, int cell, Direction a);

// Counts (before, a, after). A room change from a door cell counts as reaching
// that door's exit. Anything else that is not a single step is ignored, as are
// moves from cells the space marks uninformative for the room.
TallyModel tally_learn(const TallyModel& model, const GridBelief& before, const ValueSet& actions,
                       const GridBelief& after);

// Most likely successor; ties go to the lowest state index. An exit is not a
// cell of this room, so predicting one keeps the belief where it is.
GridBelief predict_next(const TallyModel& model, const GridBelief& belief, const ValueSet& actions);

struct LearnerParams {
  double gamma = 1.0;
  double epsilon = 0.1;
  double tolerance = 1e-6;
  int max_sweeps = 1000;
  double exit_penalty = 100.0;  // pseudo-cost of leaving through a door other than the task's
  bool one_step_td = false;
  double alpha = 0.1;
  friend bool operator==(const LearnerParams&, const LearnerParams&) = default;
};

struct QState {
  SpacePtr space;
  LearnerParams params;
  Mode mode = Mode::Learning;
  std::vector<double> q;  // [task][cell][action]
  std::mt19937_64 rng;
  std::optional<GridPos> cell;  // projected cell at the last planning call
  // Previous (cell, room, action) for the one-step TD mode.
  struct Step {
    int cell;
    RoomId room;
    Direction action;
    friend bool operator==(const Step&, const Step&) = default;
  };
  std::optional<Step> last_step;

  static QState fresh(SpacePtr space, LearnerParams params, std::uint64_t seed);

  std::size_t at(int task, int cell, Direction a) const {
    return (static_cast<std::size_t>(task) * static_cast<std::size_t>(space->cell_count()) +
            static_cast<std::size_t>(cell)) * 4 + static_cast<std::size_t>(action_index(a));
  }
  double value(int task, int cell) const;

  friend bool operator==(const QState& a, const QState& b) {
    return a.params == b.params && a.mode == b.mode && a.q == b.q && a.rng == b.rng && a.cell == b.cell &&
           a.last_step == b.last_step;
  }
};

std::string describe(const QState& s);

// Expected cost-to-go of `task` from a template cell (0 on the goal cell for
// the goal task). Nullopt for unknown tasks or cells.
std::optional<double> cost_to_go(const QState& s, const Feature& task, GridPos cell);

struct GreedyPolicy {
  SpacePtr space;
  std::optional<Feature> task;
  std::shared_ptr<const std::vector<double>> q;  // the task's [cell][action] slice
  // Exploratory choice drawn for one cell during learning.
  struct Override {
    GridPos cell;
    Direction action;
    friend bool operator==(const Override&, const Override&) = default;
  };
  std::optional<Override> explore;

  friend bool operator==(const GreedyPolicy& a, const GreedyPolicy& b) {
    const bool same_q = a.q == b.q || (a.q && b.q && *a.q == *b.q);
    return a.task == b.task && same_q && a.explore == b.explore;
  }
};

std::string describe(const GreedyPolicy& p);

// argmin over the active task's Q-values, ties in N, S, E, W order. Empty set
// when the policy has no task.
ValueSet greedy_action(const GreedyPolicy& policy, const GridBelief& belief);

// Re-solves every task's Q-table against the tally model (warm-started
// Gauss-Seidel value iteration, or a single TD backup in one-step mode) and
// returns the greedy policy for the requested task. An empty task set yields
// a policy that emits nothing.
Result<std::pair<GreedyPolicy, QState>> td_plan(const GreedyPolicy& policy, const TallyModel& model,
                                                const ValueSet& tasks, const QState& state,
                                                const GridBelief& belief);

// In-place value iteration of all task tables; returns the sweeps used.
int solve_all(QState& state, const TallyModel& model);

using Transitions = std::vector<std::vector<std::pair<int, double>>>;  // [state * 4 + action]

// States 0..n-1 from which some policy reaches a terminal with probability 1
// under `trans`. A sparse tally can make a cell look like a trap (every tried
// action only ever stayed put); with unit costs and no discount such states
// have unbounded value, so value iteration treats them as terminal at
// `exit_penalty` instead.
std::vector<bool> proper_states(int n, const Transitions& trans, const std::function<bool(int)>& terminal);

// Q-value of an action in such a trap state. Each sample already taken adds
// a tiny surcharge so the greedy choice cycles through the actions instead of
// repeating one forever.
inline constexpr double kTrapSurcharge = 1e-6;
double trap_cost(const LearnerParams& params, std::uint64_t samples);

class RlNode final : public NodeInterface {
 public:
  RlNode(SpacePtr space, LearnerParams params, GridBelief start, std::uint64_t seed);

  std::string name() const override { return "learner"; }
  Value observation_update(const Value& belief, const ValueSet& observations) const override;
  Value transition_apply(const Value& model, const Value& belief, const ValueSet& context,
                         const ValueSet& actions) const override;
  Value transition_learn(const Value& model, const Value& before, const ValueSet& context,
                         const ValueSet& actions, const Value& after) const override;
  Value utility_absorb(const Value& planning_state, const ValueSet& utilities) const override;
  PlanOutput plan(const Value& policy, const Value& model, const ValueSet& tasks, const Value& planning_state,
                  const Value& belief) const override;
  ValueSet policy_apply(const Value& policy, const Value& belief) const override;

  Value initial_belief() const override;
  Value initial_policy() const override;
  Value initial_transition_model() const override;
  Value initial_planning_state() const override;

  const SpacePtr& space() const noexcept { return space_; }

 private:
  SpacePtr space_;
  LearnerParams params_;
  GridBelief start_;
  std::uint64_t seed_;
};

// CSV `task,x,y,action,q`.
std::string q_table_csv(const QState& s);
// CSV `x,y,action,nx,ny,count`, non-zero counts only.
std::string tally_csv(const TallyModel& m);

}  // namespace cogh::rl
