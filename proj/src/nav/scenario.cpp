#include "cogh/nav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cogh::nav {

using grid::Direction;
using grid::Feature;
using planner::SymbolicBelief;

Scenario canonical_scenario() {
  Scenario s;
  s.map = std::make_shared<const grid::WorldMap>(grid::canonical_map());
  s.start_room = grid::kCanonicalStartRoom;
  s.start = grid::canonical_start();
  return s;
}

ValueSet sense_0_1(const Value& world_belief) {
  const auto* w = world_belief.get_if<grid::WorldState>();
  if (!w) return {};
  return ValueSet::single(grid::sense_world(*w));
}

planner::SymbolicBelief symbolic_at(const grid::WorldMap& map, const Location& loc) {
  return {loc.room, map.feature_at(loc.room, loc.pos)};
}

ValueSet sense_1_2(const grid::WorldMap& map, const Value& grid_belief) {
  const auto* b = grid_belief.get_if<rl::GridBelief>();
  if (!b) return {};
  return ValueSet::single(symbolic_at(map, *b));
}

long long round_half_up(double v) { return static_cast<long long>(std::floor(v + 0.5)); }

planner::CostTables cost_tables(const rl::QState& q, GridPos cell) {
  planner::CostTables out;
  const auto& space = *q.space;
  for (const Feature& f : space.tasks())
    if (auto c = rl::cost_to_go(q, f, cell)) out.ctf[f] = round_half_up(*c);
  for (const Feature& from : space.tasks()) {
    const auto at = space.feature_cell(from);
    if (!at) continue;
    for (const Feature& to : space.tasks())
      if (auto c = rl::cost_to_go(q, to, space.position(*at))) out.cbf[{from, to}] = round_half_up(*c);
  }
  return out;
}

ValueSet util_1_2(const Value& learner_state) {
  const auto* q = learner_state.get_if<rl::QState>();
  if (!q || !q->cell) return {};
  return ValueSet::single(cost_tables(*q, *q->cell));
}

ValueSet task_2_1(const ValueSet& planner_actions) {
  ValueSet out;
  for (const Value& v : planner_actions)
    if (const auto* a = v.get_if<planner::Action>()) out.insert(Value::of(a->target()));
  return out;
}

ValueSet task_1_0(const ValueSet& learner_actions) {
  ValueSet out;
  for (const Value& v : learner_actions)
    if (const auto* d = v.get_if<Direction>()) out.insert(Value::of(grid::command_of(*d)));
  return out;
}

rl::SpacePtr projected_space(const grid::WorldMap& map) {
  std::map<RoomId, std::set<grid::DoorLabel>> doors;
  for (const auto& [id, room] : map.rooms())
    for (const auto& [pos, label] : room.doors) doors[id].insert(label);
  return std::make_shared<const rl::ProjectedSpace>(map.projected_template(), std::move(doors));
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

FunctionTuple edge_for(const Scenario& s, std::uint32_t lower, std::uint32_t upper) {
  FunctionTuple e{NodeId{lower}, NodeId{upper}, no_values, no_values, no_values, no_tasks};
  if (lower == 0 && upper == 1) {
    e.sensing = sense_0_1;
    e.task_param = task_1_0;
  } else if (lower == 1 && upper == 2) {
    auto map = s.map;
    e.sensing = [map](const Value& b) { return sense_1_2(*map, b); };
    e.utility = util_1_2;
    e.task_param = task_2_1;
  }
  return e;
}

}  // namespace

Result<std::shared_ptr<const Hierarchy>> build_wiring(const Scenario& s) {
  if (!s.map) return make_error(ErrorCode::InvalidScenario, "scenario has no map");
  auto world = grid::world_as_node(s.map, s.motion, s.start_room, s.start, s.seed);
  if (!world) return world.error();
  const Location start{s.start_room, s.start};
  auto h = std::make_shared<Hierarchy>(kWorld);
  h->add_node(kWorld, std::move(world).value());
  h->add_node(kLearner, std::make_shared<const rl::RlNode>(projected_space(*s.map), s.learner, start, mix(s.seed)));
  h->add_node(kPlanner, planner::planner_as_node(planner::room_graph(*s.map), s.horizon, symbolic_at(*s.map, start)));
  for (const auto& [lower, upper] : s.wiring) h->add_edge(edge_for(s, lower, upper));
  return std::shared_ptr<const Hierarchy>(std::move(h));
}

Result<ActiveHierarchy> build_hierarchy(const Scenario& s) {
  auto h = build_wiring(s);
  if (!h) return h.error();
  return ActiveHierarchy::initial(std::move(h).value());
}

const grid::WorldState& world_of(const ActiveHierarchy& ah) {
  return ah.node(kWorld).current_belief.as<grid::WorldState>();
}
const rl::QState& learner_state(const ActiveHierarchy& ah) {
  return ah.node(kLearner).planning_state.as<rl::QState>();
}
const rl::TallyModel& learner_model(const ActiveHierarchy& ah) {
  return ah.node(kLearner).transition_model.as<rl::TallyModel>();
}
const planner::PlannerState& planner_state(const ActiveHierarchy& ah) {
  return ah.node(kPlanner).planning_state.as<planner::PlannerState>();
}

ActiveHierarchy reset_episode(const ActiveHierarchy& ah, const Scenario& s, rl::Mode mode) {
  const Hierarchy& h = ah.hierarchy();
  const Location start{s.start_room, s.start};
  ActiveHierarchy out = ah;

  ActiveNode w = out.node(kWorld);
  grid::WorldState ws = w.current_belief.as<grid::WorldState>();
  ws.room = s.start_room;
  ws.pos = s.start;
  ws.last_command.reset();
  ws.last_actual.reset();
  w.current_belief = w.predicted_belief = w.corrected_belief = Value::of(std::move(ws));
  out = out.with_node(std::move(w));

  if (out.contains(kLearner)) {
    ActiveNode n = out.node(kLearner);
    n.current_belief = n.predicted_belief = n.corrected_belief = Value::of(start);
    n.policy = h.node(kLearner).initial_policy();
    rl::QState q = n.planning_state.as<rl::QState>();
    q.cell = s.start;
    q.last_step.reset();
    q.mode = mode;
    n.planning_state = Value::of(std::move(q));
    out = out.with_node(std::move(n));
  }
  if (out.contains(kPlanner)) {
    ActiveNode n = out.node(kPlanner);
    n.current_belief = n.predicted_belief = n.corrected_belief = Value::of(symbolic_at(*s.map, start));
    n.policy = h.node(kPlanner).initial_policy();
    planner::PlannerState p = n.planning_state.as<planner::PlannerState>();
    p.plan.reset();
    p.cursor = 0;
    p.last_error.reset();
    n.planning_state = Value::of(std::move(p));
    out = out.with_node(std::move(n));
  }
  return out;
}

namespace {

bool at_goal(const grid::WorldState& w) {
  return w.room == w.map->goal_room() && w.pos == w.map->goal_pos();
}

}  // namespace

namespace {

RoomId planned_next(const ActiveHierarchy& ah, RoomId from) {
  if (!ah.contains(kPlanner)) return from;
  const auto& plan = planner_state(ah).plan;
  if (!plan) return from;
  const std::vector<RoomId> rooms = plan->rooms();
  for (std::size_t k = 0; k + 1 < rooms.size(); ++k)
    if (rooms[k] == from) return rooms[k + 1];
  return from;
}

}  // namespace

Result<EpisodeResult> run_episode(const ActiveHierarchy& ah, const Scenario& s, int max_steps, rl::Mode mode,
                                  EpisodeOptions options) {
  ActiveHierarchy cur = reset_episode(ah, s, mode);
  EpisodeResult r{0, false, cur, {s.start_room}, std::nullopt, {s.start_room}, {}};
  if (options.record_trajectory) r.trajectory.push_back({0, {s.start_room, s.start}, std::nullopt, std::nullopt});

  // Idle cycles (no motor command) are bounded separately from steps.
  const std::size_t cycle_cap = static_cast<std::size_t>(std::max(max_steps, 0)) * 4 + 16;
  std::size_t cycles = 0;
  while (true) {
    const grid::WorldState& before = world_of(cur);
    if (at_goal(before)) {
      r.reached = true;
      break;
    }
    if (r.steps >= static_cast<std::size_t>(std::max(max_steps, 0)) || cycles >= cycle_cap) break;
    const std::uint64_t steps_before = before.steps;
    const grid::RoomId room_before = before.room;
    auto next = process_update(cur);
    if (!next) return next.error();
    cur = std::move(next).value();
    ++cycles;

    if (!r.first_plan && cur.contains(kPlanner)) {
      if (const auto& p = planner_state(cur).plan) r.first_plan = *p;
    }
    const grid::WorldState& after = world_of(cur);
    if (after.steps == steps_before) continue;
    r.steps += after.steps - steps_before;
    if (after.room != room_before) {
      r.rooms.push_back(after.room);
      r.planned_rooms.push_back(planned_next(cur, room_before));
    }
    if (options.record_trajectory)
      r.trajectory.push_back({r.steps, {after.room, after.pos}, after.last_command, after.last_actual});
  }
  if (r.reached) {
    // One more cycle lets the upper levels observe the final transition; at
    // the goal the planner emits nothing, so the robot does not move.
    auto next = process_update(cur);
    if (!next) return next.error();
    cur = std::move(next).value();
  }
  r.final = std::move(cur);
  return r;
}

Result<planner::Plan> plan_from_start(const ActiveHierarchy& ah, const Scenario& s) {
  ActiveHierarchy cur = reset_episode(ah, s, rl::Mode::Evaluation);
  auto u = utility_update(cur, kPlanner);
  if (!u) return u.error();
  auto a = action_update(u.value(), kPlanner);
  if (!a) return a.error();
  const planner::PlannerState& ps = planner_state(a.value());
  if (ps.plan) return *ps.plan;
  if (ps.last_error) return *ps.last_error;
  return make_error(ErrorCode::NoPlan, "planner has no cost tables yet");
}

FlatAgent::FlatAgent(std::shared_ptr<const grid::WorldMap> map, rl::LearnerParams params, std::uint64_t seed)
    : map_(std::move(map)), params_(params), rng_(seed) {
  template_ = map_->projected_template();
  space_ = std::make_shared<const rl::ProjectedSpace>(template_);
  rooms_ = map_->room_ids();
  cells_ = space_->cell_count();
  goal_state_ = state_of({map_->goal_room(), map_->goal_pos()}).value_or(-1);
  q_.assign(static_cast<std::size_t>(state_count()) * 4, 0.0);
  counts_.resize(static_cast<std::size_t>(state_count()) * 4);
  solve();
}

std::optional<int> FlatAgent::state_of(const Location& loc) const {
  auto it = std::find(rooms_.begin(), rooms_.end(), loc.room);
  const auto cell = space_->index_of(loc.pos);
  if (it == rooms_.end() || !cell) return std::nullopt;
  return static_cast<int>(it - rooms_.begin()) * cells_ + *cell;
}

Location FlatAgent::location_of(int state) const {
  return {rooms_[static_cast<std::size_t>(state / cells_)], space_->position(state % cells_)};
}

int FlatAgent::prior(int state, Direction a) const {
  const int base = state - state % cells_;
  const int cell = state % cells_;
  if (auto n = space_->neighbour(cell, a)) return base + *n;
  if (space_->outward_of(cell) == a) return kOptimisticExit;
  return state;
}

std::vector<std::pair<int, double>> FlatAgent::probs(int state, Direction a) const {
  const auto& c = counts_[static_cast<std::size_t>(state) * 4 + static_cast<std::size_t>(rl::action_index(a))];
  const int p = prior(state, a);
  double total = rl::kPriorPseudoCount;
  for (const auto& [_, n] : c) total += n;
  std::vector<std::pair<int, double>> out{{p, rl::kPriorPseudoCount / total}};
  for (const auto& [s, n] : c) {
    if (s == p) out.front().second += n / total;
    else out.emplace_back(s, n / total);
  }
  return out;
}

double FlatAgent::value(int state) const {
  if (state == kOptimisticExit || state == goal_state_) return 0.0;
  const std::size_t k = static_cast<std::size_t>(state) * 4;
  return std::min({q_[k], q_[k + 1], q_[k + 2], q_[k + 3]});
}

double FlatAgent::value(const Location& loc) const {
  const auto s = state_of(loc);
  return s ? value(*s) : std::numeric_limits<double>::infinity();
}

Direction FlatAgent::choose(const Location& loc, rl::Mode mode) {
  if (mode == rl::Mode::Learning && params_.epsilon > 0.0) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (u < params_.epsilon) return grid::kDirections[std::uniform_int_distribution<int>(0, 3)(rng_)];
  }
  const auto s = state_of(loc);
  if (!s) return Direction::N;
  Direction best = Direction::N;
  double best_q = std::numeric_limits<double>::infinity();
  for (Direction a : grid::kDirections) {
    const double v = q_[static_cast<std::size_t>(*s) * 4 + static_cast<std::size_t>(rl::action_index(a))];
    if (v < best_q) {
      best_q = v;
      best = a;
    }
  }
  return best;
}

void FlatAgent::observe(const Location& from, Direction a, const Location& to) {
  const auto s = state_of(from);
  const auto t = state_of(to);
  if (!s || !t) return;
  auto& c = counts_[static_cast<std::size_t>(*s) * 4 + static_cast<std::size_t>(rl::action_index(a))];
  auto it = std::find_if(c.begin(), c.end(), [&](const auto& e) { return e.first == *t; });
  if (it == c.end()) c.emplace_back(*t, 1);
  else ++it->second;
  std::sort(c.begin(), c.end());
  if (params_.one_step_td && *s != goal_state_) {
    double& q = q_[static_cast<std::size_t>(*s) * 4 + static_cast<std::size_t>(rl::action_index(a))];
    q += params_.alpha * (1.0 + params_.gamma * value(*t) - q);
  }
}

void FlatAgent::solve() {
  if (params_.one_step_td) return;
  const int n = state_count();
  rl::Transitions trans(static_cast<std::size_t>(n) * 4);
  for (int s = 0; s < n; ++s)
    for (Direction a : grid::kDirections)
      trans[static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(rl::action_index(a))] = probs(s, a);
  const auto proper = rl::proper_states(n, trans, [&](int s) { return s < 0 || s == goal_state_; });
  auto value_of = [&](int s) {
    if (s >= 0 && s != goal_state_ && !proper[static_cast<std::size_t>(s)]) return params_.exit_penalty;
    return value(s);
  };
  for (int s = 0; s < n; ++s) {
    if (proper[static_cast<std::size_t>(s)]) continue;
    for (int a = 0; a < 4; ++a) {
      const std::size_t k = static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(a);
      std::uint64_t tried = 0;
      for (const auto& [_, c] : counts_[k]) tried += c;
      q_[k] = rl::trap_cost(params_, tried);
    }
  }
  for (int sweep = 0; sweep < params_.max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < n; ++s) {
      if (s == goal_state_ || !proper[static_cast<std::size_t>(s)]) continue;
      for (int a = 0; a < 4; ++a) {
        const std::size_t k = static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(a);
        double v = 0.0;
        for (const auto& [succ, p] : trans[k]) v += p * (1.0 + params_.gamma * value_of(succ));
        delta = std::max(delta, std::abs(v - q_[k]));
        q_[k] = v;
      }
    }
    if (delta < params_.tolerance) break;
  }
}

FlatEpisode run_flat_episode(FlatAgent& agent, grid::WorldState& world, const Scenario& s, int max_steps,
                             rl::Mode mode) {
  world.room = s.start_room;
  world.pos = s.start;
  world.last_command.reset();
  world.last_actual.reset();
  FlatEpisode r;
  while (true) {
    if (world.room == world.map->goal_room() && world.pos == world.map->goal_pos()) {
      r.reached = true;
      break;
    }
    if (r.steps >= static_cast<std::size_t>(std::max(max_steps, 0))) break;
    const Location from{world.room, world.pos};
    const Direction a = agent.choose(from, mode);
    auto next = grid::step_world(world, s.motion, grid::command_of(a));
    if (!next) break;
    world = std::move(next).value();
    ++r.steps;
    agent.observe(from, a, {world.room, world.pos});
    agent.solve();
  }
  return r;
}

}  // namespace cogh::nav
