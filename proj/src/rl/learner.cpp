#include "cogh/rl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cogh::rl {

ProjectedSpace::ProjectedSpace(RoomTemplate room, std::map<RoomId, std::set<DoorLabel>> room_doors)
    : room_(std::move(room)), room_doors_(std::move(room_doors)) {
  index_.assign(static_cast<std::size_t>(room_.width * room_.height), -1);
  for (int y = 0; y < room_.height; ++y) {
    for (int x = 0; x < room_.width; ++x) {
      if (!room_.is_traversable({x, y})) continue;
      index_[static_cast<std::size_t>(y * room_.width + x)] = static_cast<int>(cells_.size());
      cells_.push_back({x, y});
    }
  }
  for (const auto& [label, pos] : room_.doors) {
    const auto out = room_.outward(pos);
    const auto cell = index_of(pos);
    if (!out || !cell) continue;
    exits_.push_back({label, grid::step(pos, *out), *cell});
    tasks_.push_back(Feature::of_door(label));
  }
  if (room_.goal && index_of(*room_.goal)) tasks_.push_back(Feature::goal());
}

std::optional<int> ProjectedSpace::index_of(GridPos p) const {
  if (!room_.inside(p)) return std::nullopt;
  const int i = index_[static_cast<std::size_t>(p.y * room_.width + p.x)];
  if (i < 0) return std::nullopt;
  return i;
}

GridPos ProjectedSpace::position(int state) const {
  if (is_exit(state)) return exits_.at(static_cast<std::size_t>(state - cell_count())).beyond;
  return cells_.at(static_cast<std::size_t>(state));
}

std::optional<int> ProjectedSpace::exit_of_label(DoorLabel d) const {
  for (std::size_t k = 0; k < exits_.size(); ++k)
    if (exits_[k].label == d) return cell_count() + static_cast<int>(k);
  return std::nullopt;
}

std::optional<int> ProjectedSpace::exit_from(int cell) const {
  for (std::size_t k = 0; k < exits_.size(); ++k)
    if (exits_[k].door_cell == cell) return cell_count() + static_cast<int>(k);
  return std::nullopt;
}

std::optional<Direction> ProjectedSpace::outward_of(int cell) const {
  if (!exit_from(cell)) return std::nullopt;
  return room_.outward(position(cell));
}

bool ProjectedSpace::informative(RoomId room, int cell) const {
  if (room_doors_.empty() || is_exit(cell)) return true;
  const auto e = exit_from(cell);
  if (!e) return true;
  auto it = room_doors_.find(room);
  return it != room_doors_.end() && it->second.count(exit_label(*e)) != 0;
}

std::optional<int> ProjectedSpace::neighbour(int cell, Direction d) const {
  return index_of(grid::step(position(cell), d));
}

std::optional<int> ProjectedSpace::task_index(const Feature& f) const {
  for (std::size_t k = 0; k < tasks_.size(); ++k)
    if (tasks_[k] == f) return static_cast<int>(k);
  return std::nullopt;
}

std::optional<int> ProjectedSpace::feature_cell(const Feature& f) const {
  if (f.is_goal()) return room_.goal ? index_of(*room_.goal) : std::nullopt;
  if (f.is_door()) {
    auto it = room_.doors.find(f.door);
    if (it != room_.doors.end()) return index_of(it->second);
  }
  return std::nullopt;
}

int ProjectedSpace::prior_successor(int cell, Direction a) const {
  if (auto n = neighbour(cell, a)) return *n;
  if (outward_of(cell) == a) return *exit_from(cell);
  return cell;
}

std::optional<int> ProjectedSpace::slot_state(int cell, int slot) const {
  if (slot == 0) return cell;
  if (slot >= 1 && slot <= 4) return neighbour(cell, grid::kDirections[slot - 1]);
  if (slot == 5) return exit_from(cell);
  return std::nullopt;
}

std::optional<int> ProjectedSpace::slot_of(int cell, int successor) const {
  for (int s = 0; s < kSlots; ++s)
    if (slot_state(cell, s) == successor) return s;
  return std::nullopt;
}

TallyModel::TallyModel(SpacePtr space) : space_(std::move(space)) {
  counts_.assign(static_cast<std::size_t>(space_->cell_count()) * 4 * ProjectedSpace::kSlots, 0);
}

std::uint32_t TallyModel::count(int cell, Direction a, int successor) const {
  if (cell < 0 || cell >= space_->cell_count()) return 0;
  const auto slot = space_->slot_of(cell, successor);
  if (!slot) return 0;
  return counts_[offset(cell, a) + static_cast<std::size_t>(*slot)];
}

std::uint32_t TallyModel::total(int cell, Direction a) const {
  if (cell < 0 || cell >= space_->cell_count()) return 0;
  std::uint32_t sum = 0;
  for (int s = 0; s < ProjectedSpace::kSlots; ++s) sum += counts_[offset(cell, a) + static_cast<std::size_t>(s)];
  return sum;
}

bool TallyModel::add(int cell, Direction a, int successor, std::uint32_t n) {
  if (cell < 0 || cell >= space_->cell_count()) return false;
  const auto slot = space_->slot_of(cell, successor);
  if (!slot) return false;
  counts_[offset(cell, a) + static_cast<std::size_t>(*slot)] += n;
  return true;
}

std::string describe(const TallyModel& m) {
  std::uint32_t n = 0;
  if (m.space())
    for (int c = 0; c < m.space()->cell_count(); ++c)
      for (Direction a : grid::kDirections) n += m.total(c, a);
  return "tally(" + std::to_string(n) + ")";
}

std::vector<std::pair<int, double>> empirical_probs(const TallyModel& model, int cell, Direction a) {
  const auto& space = *model.space();
  const int prior = space.prior_successor(cell, a);
  const double total = model.total(cell, a) + kPriorPseudoCount;
  std::vector<std::pair<int, double>> out{{prior, kPriorPseudoCount / total}};
  for (int s = 0; s < ProjectedSpace::kSlots; ++s) {
    const auto succ = space.slot_state(cell, s);
    if (!succ) continue;
    const std::uint32_t c = model.count(cell, a, *succ);
    if (c == 0) continue;
    if (*succ == prior) out.front().second += c / total;
    else out.emplace_back(*succ, c / total);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::optional<Direction> single_action(const ValueSet& actions) {
  if (actions.size() != 1) return std::nullopt;
  if (const auto* d = actions.front().get_if<Direction>()) return *d;
  return std::nullopt;
}

}  // namespace

TallyModel tally_learn(const TallyModel& model, const GridBelief& before, const ValueSet& actions,
                       const GridBelief& after) {
  const auto a = single_action(actions);
  if (!a) return model;
  const auto& space = *model.space();
  const auto from = space.index_of(before.pos);
  if (!from || !space.informative(before.room, *from)) return model;
  std::optional<int> to;
  if (before.room == after.room) to = space.index_of(after.pos);
  else to = space.exit_from(*from);
  if (!to || !space.slot_of(*from, *to)) return model;
  TallyModel next = model;
  next.add(*from, *a, *to);
  return next;
}

GridBelief predict_next(const TallyModel& model, const GridBelief& belief, const ValueSet& actions) {
  const auto a = single_action(actions);
  if (!a) return belief;
  const auto from = model.space()->index_of(belief.pos);
  if (!from) return belief;
  int best = -1;
  double best_p = -1.0;
  for (const auto& [s, p] : empirical_probs(model, *from, *a)) {
    if (p > best_p) {
      best = s;
      best_p = p;
    }
  }
  if (best < 0 || model.space()->is_exit(best)) return belief;
  return {belief.room, model.space()->position(best)};
}

QState QState::fresh(SpacePtr space, LearnerParams params, std::uint64_t seed) {
  QState s;
  s.params = params;
  s.q.assign(space->tasks().size() * static_cast<std::size_t>(space->cell_count()) * 4, 0.0);
  s.space = std::move(space);
  s.rng.seed(seed);
  return s;
}

double QState::value(int task, int cell) const {
  const std::size_t base = at(task, cell, Direction::N);
  return std::min({q[base], q[base + 1], q[base + 2], q[base + 3]});
}

std::string describe(const QState& s) {
  return "Q(" + (s.cell ? grid::to_string(*s.cell) : std::string("-")) + ")";
}

std::optional<double> cost_to_go(const QState& s, const Feature& task, GridPos cell) {
  const auto t = s.space->task_index(task);
  const auto c = s.space->index_of(cell);
  if (!t || !c) return std::nullopt;
  if (task.is_goal() && s.space->feature_cell(task) == c) return 0.0;
  return s.value(*t, *c);
}

std::string describe(const GreedyPolicy& p) {
  return "greedy(" + (p.task ? grid::to_string(*p.task) : std::string("-")) + ")";
}

ValueSet greedy_action(const GreedyPolicy& policy, const GridBelief& belief) {
  if (!policy.task || !policy.q || !policy.space) return {};
  if (policy.explore && policy.explore->cell == belief.pos) return ValueSet::single(policy.explore->action);
  const auto cell = policy.space->index_of(belief.pos);
  if (!cell) return {};
  const std::size_t base = static_cast<std::size_t>(*cell) * 4;
  Direction best = Direction::N;
  double best_q = std::numeric_limits<double>::infinity();
  for (Direction a : grid::kDirections) {
    const double v = (*policy.q)[base + static_cast<std::size_t>(action_index(a))];
    if (v < best_q) {
      best_q = v;
      best = a;
    }
  }
  return ValueSet::single(best);
}

namespace {

struct TaskTerminals {
  int own_exit = -1;   // door tasks
  int goal_cell = -1;  // goal task
};

TaskTerminals terminals_of(const ProjectedSpace& space, int task) {
  const Feature& f = space.tasks()[static_cast<std::size_t>(task)];
  TaskTerminals t;
  if (f.is_goal()) t.goal_cell = space.feature_cell(f).value_or(-1);
  else t.own_exit = space.exit_of_label(f.door).value_or(-1);
  return t;
}

double state_value(const QState& s, int task, const TaskTerminals& term, int state) {
  if (s.space->is_exit(state)) return state == term.own_exit ? 0.0 : s.params.exit_penalty;
  if (state == term.goal_cell) return 0.0;
  return s.value(task, state);
}

}  // namespace

std::vector<bool> proper_states(int n, const Transitions& trans, const std::function<bool(int)>& terminal) {
  std::vector<bool> inside(static_cast<std::size_t>(n), true);
  auto ok_succ = [&](int s) { return terminal(s) || inside[static_cast<std::size_t>(s)]; };
  while (true) {
    // Positive-probability reachability of a terminal using only actions that
    // cannot leave the candidate set.
    std::vector<bool> good(static_cast<std::size_t>(n), false);
    for (bool changed = true; changed;) {
      changed = false;
      for (int s = 0; s < n; ++s) {
        if (!inside[static_cast<std::size_t>(s)] || good[static_cast<std::size_t>(s)]) continue;
        if (terminal(s)) {
          good[static_cast<std::size_t>(s)] = true;
          changed = true;
          continue;
        }
        for (int a = 0; a < 4 && !good[static_cast<std::size_t>(s)]; ++a) {
          const auto& succ = trans[static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(a)];
          bool closed = true, progress = false;
          for (const auto& [t, p] : succ) {
            if (p <= 0.0) continue;
            if (!ok_succ(t)) closed = false;
            else if (terminal(t) || good[static_cast<std::size_t>(t)]) progress = true;
          }
          if (closed && progress) {
            good[static_cast<std::size_t>(s)] = true;
            changed = true;
          }
        }
      }
    }
    if (good == inside) return inside;
    inside = std::move(good);
  }
}

double trap_cost(const LearnerParams& params, std::uint64_t samples) {
  return params.exit_penalty + kTrapSurcharge * static_cast<double>(samples);
}

int solve_all(QState& state, const TallyModel& model) {
  const ProjectedSpace& space = *state.space;
  const int cells = space.cell_count();
  Transitions trans(static_cast<std::size_t>(cells) * 4);
  for (int c = 0; c < cells; ++c)
    for (Direction a : grid::kDirections)
      trans[static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(action_index(a))] =
          empirical_probs(model, c, a);

  int used = 0;
  const int tasks = static_cast<int>(space.tasks().size());
  for (int t = 0; t < tasks; ++t) {
    const TaskTerminals term = terminals_of(space, t);
    const auto proper =
        proper_states(cells, trans, [&](int s) { return space.is_exit(s) || s == term.goal_cell; });
    auto value_of = [&](int s) {
      if (!space.is_exit(s) && s != term.goal_cell && !proper[static_cast<std::size_t>(s)])
        return state.params.exit_penalty;
      return state_value(state, t, term, s);
    };
    for (int c = 0; c < cells; ++c) {
      if (proper[static_cast<std::size_t>(c)] || c == term.goal_cell) continue;
      for (Direction a : grid::kDirections) state.q[state.at(t, c, a)] = trap_cost(state.params, model.total(c, a));
    }
    for (int sweep = 0; sweep < state.params.max_sweeps; ++sweep) {
      double delta = 0.0;
      for (int c = 0; c < cells; ++c) {
        if (!proper[static_cast<std::size_t>(c)]) continue;
        for (Direction a : grid::kDirections) {
          const std::size_t k = state.at(t, c, a);
          double v = 0.0;
          if (c != term.goal_cell)
            for (const auto& [succ, p] :
               trans[static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(action_index(a))])
            v += p * (1.0 + state.params.gamma * value_of(succ));
          delta = std::max(delta, std::abs(v - state.q[k]));
          state.q[k] = v;
        }
      }
      ++used;
      if (delta < state.params.tolerance) break;
    }
  }
  return used;
}

namespace {

void td_backup(QState& s, const GridBelief& belief) {
  if (!s.last_step) return;
  const ProjectedSpace& space = *s.space;
  std::optional<int> next;
  if (belief.room == s.last_step->room) next = space.index_of(belief.pos);
  else next = space.exit_from(s.last_step->cell);
  if (!next) return;
  for (int t = 0; t < static_cast<int>(space.tasks().size()); ++t) {
    const TaskTerminals term = terminals_of(space, t);
    if (s.last_step->cell == term.goal_cell) continue;
    const double target = 1.0 + s.params.gamma * state_value(s, t, term, *next);
    double& q = s.q[s.at(t, s.last_step->cell, s.last_step->action)];
    q += s.params.alpha * (target - q);
  }
}

}  // namespace

Result<std::pair<GreedyPolicy, QState>> td_plan(const GreedyPolicy& policy, const TallyModel& model,
                                                const ValueSet& tasks, const QState& state,
                                                const GridBelief& belief) {
  std::optional<int> task;
  if (!tasks.empty()) {
    const auto* f = tasks.front().get_if<Feature>();
    if (!f) return make_error(ErrorCode::UnknownTask, "task parameter " + tasks.front().str() + " is not a feature");
    task = state.space->task_index(*f);
    if (!task) return make_error(ErrorCode::UnknownTask, "no Q-table for task " + grid::to_string(*f));
  }

  QState next = state;
  if (next.params.one_step_td) td_backup(next, belief);
  else solve_all(next, model);
  next.cell = belief.pos;

  GreedyPolicy out;
  out.space = next.space;
  if (!task) {
    next.last_step.reset();
    return std::make_pair(out, next);
  }
  out.task = next.space->tasks()[static_cast<std::size_t>(*task)];
  const std::size_t slice = static_cast<std::size_t>(next.space->cell_count()) * 4;
  const auto begin = next.q.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(*task) * slice);
  // Reuse the previous slice when nothing changed so the policy compares cheaply.
  if (policy.q && policy.task == out.task && std::equal(begin, begin + static_cast<std::ptrdiff_t>(slice),
                                                        policy.q->begin(), policy.q->end()))
    out.q = policy.q;
  else
    out.q = std::make_shared<const std::vector<double>>(begin, begin + static_cast<std::ptrdiff_t>(slice));

  if (next.mode == Mode::Learning && next.params.epsilon > 0.0) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(next.rng);
    if (u < next.params.epsilon) {
      const int k = std::uniform_int_distribution<int>(0, 3)(next.rng);
      out.explore = GreedyPolicy::Override{belief.pos, grid::kDirections[k]};
    }
  }

  const auto cell = next.space->index_of(belief.pos);
  const ValueSet chosen = greedy_action(out, belief);
  if (cell && !chosen.empty())
    next.last_step = QState::Step{*cell, belief.room, chosen.front().as<Direction>()};
  else
    next.last_step.reset();
  return std::make_pair(out, next);
}

RlNode::RlNode(SpacePtr space, LearnerParams params, GridBelief start, std::uint64_t seed)
    : space_(std::move(space)), params_(params), start_(start), seed_(seed) {}

Value RlNode::observation_update(const Value& belief, const ValueSet& observations) const {
  for (const Value& o : observations)
    if (o.holds<GridBelief>()) return o;
  return belief;
}

Value RlNode::transition_apply(const Value& model, const Value& belief, const ValueSet&,
                               const ValueSet& actions) const {
  const auto* m = model.get_if<TallyModel>();
  const auto* b = belief.get_if<GridBelief>();
  if (!m || !b) return belief;
  return Value::of(predict_next(*m, *b, actions));
}

Value RlNode::transition_learn(const Value& model, const Value& before, const ValueSet&, const ValueSet& actions,
                               const Value& after) const {
  const auto* m = model.get_if<TallyModel>();
  const auto* b = before.get_if<GridBelief>();
  const auto* a = after.get_if<GridBelief>();
  if (!m || !b || !a) return model;
  TallyModel next = tally_learn(*m, *b, actions, *a);
  if (next == *m) return model;
  return Value::of(std::move(next));
}

Value RlNode::utility_absorb(const Value& planning_state, const ValueSet&) const { return planning_state; }

PlanOutput RlNode::plan(const Value& policy, const Value& model, const ValueSet& tasks, const Value& planning_state,
                        const Value& belief) const {
  const auto* pol = policy.get_if<GreedyPolicy>();
  const auto* m = model.get_if<TallyModel>();
  const auto* ps = planning_state.get_if<QState>();
  const auto* b = belief.get_if<GridBelief>();
  if (!pol || !m || !ps || !b) return {policy, planning_state};
  auto planned = td_plan(*pol, *m, tasks, *ps, *b);
  if (!planned) {
    GreedyPolicy idle;
    idle.space = space_;
    return {Value::of(std::move(idle)), planning_state};
  }
  auto [next_policy, next_state] = std::move(planned).value();
  return {Value::of(std::move(next_policy)), Value::of(std::move(next_state))};
}

ValueSet RlNode::policy_apply(const Value& policy, const Value& belief) const {
  const auto* pol = policy.get_if<GreedyPolicy>();
  const auto* b = belief.get_if<GridBelief>();
  if (!pol || !b) return {};
  return greedy_action(*pol, *b);
}

Value RlNode::initial_belief() const { return Value::of(start_); }

Value RlNode::initial_policy() const {
  GreedyPolicy p;
  p.space = space_;
  return Value::of(std::move(p));
}

Value RlNode::initial_transition_model() const { return Value::of(TallyModel(space_)); }

Value RlNode::initial_planning_state() const { return Value::of(QState::fresh(space_, params_, seed_)); }

std::string q_table_csv(const QState& s) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "task,x,y,action,q\n";
  const auto& space = *s.space;
  for (int t = 0; t < static_cast<int>(space.tasks().size()); ++t) {
    for (int c = 0; c < space.cell_count(); ++c) {
      const GridPos p = space.position(c);
      for (Direction a : grid::kDirections)
        os << grid::to_string(space.tasks()[static_cast<std::size_t>(t)]) << ',' << p.x << ',' << p.y << ','
           << grid::to_char(a) << ',' << s.q[s.at(t, c, a)] << '\n';
    }
  }
  return os.str();
}

std::string tally_csv(const TallyModel& m) {
  std::ostringstream os;
  os << "x,y,action,nx,ny,count\n";
  const auto& space = *m.space();
  for (int c = 0; c < space.cell_count(); ++c) {
    const GridPos p = space.position(c);
    for (Direction a : grid::kDirections) {
      for (int slot = 0; slot < ProjectedSpace::kSlots; ++slot) {
        const auto succ = space.slot_state(c, slot);
        if (!succ) continue;
        const std::uint32_t n = m.count(c, a, *succ);
        if (n == 0) continue;
        const GridPos q = space.position(*succ);
        os << p.x << ',' << p.y << ',' << grid::to_char(a) << ',' << q.x << ',' << q.y << ',' << n << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace cogh::rl
