#include "cogh/planner/planner.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace cogh::planner {

std::string describe(const SymbolicBelief& b) {
  return "at(" + grid::to_string(b.room) + "," + grid::to_string(b.feature) + ")";
}

void RoomGraph::connect(RoomId a, DoorLabel da, RoomId b, DoorLabel db) {
  for (const Conn& c : {Conn{a, da, b, db}, Conn{b, db, a, da}}) {
    auto it = std::lower_bound(conns.begin(), conns.end(), c);
    if (it == conns.end() || *it != c) conns.insert(it, c);
  }
}

std::optional<Conn> RoomGraph::via(RoomId room, DoorLabel door) const {
  for (const Conn& c : conns)
    if (c.from_room == room && c.from_door == door) return c;
  return std::nullopt;
}

std::vector<RoomId> RoomGraph::rooms() const {
  std::set<RoomId> out{goal_in};
  for (const Conn& c : conns) {
    out.insert(c.from_room);
    out.insert(c.to_room);
  }
  return {out.begin(), out.end()};
}

std::string describe(const RoomGraph& g) {
  std::string out;
  for (const Conn& c : g.conns) {
    if (c.to_room < c.from_room) continue;
    out += "conn(" + grid::to_string(c.from_room) + "," + grid::to_string(c.from_door) + "," +
           grid::to_string(c.to_room) + "," + grid::to_string(c.to_door) + ") ";
  }
  return out + "goal_in(" + grid::to_string(g.goal_in) + ")";
}

RoomGraph room_graph(const grid::WorldMap& map) {
  RoomGraph g;
  for (const auto& w : map.doorways()) g.connect(w.a.room, w.a.door, w.b.room, w.b.door);
  g.goal_in = map.goal_room();
  return g;
}

std::string describe(const CostTables& c) {
  std::ostringstream os;
  os << "ctf{";
  bool first = true;
  for (const auto& [f, v] : c.ctf) {
    os << (first ? "" : ",") << grid::to_string(f) << ':' << v;
    first = false;
  }
  os << "} cbf[" << c.cbf.size() << "]";
  return os.str();
}

std::string to_string(const Action& a) {
  return a.kind == Action::Kind::MvGoal ? "mv_goal" : "trv(" + grid::to_string(a.door) + ")";
}

std::optional<Action> parse_action(const std::string& s) {
  if (s == "mv_goal") return Action::mv_goal();
  if (s.size() > 5 && s.rfind("trv(", 0) == 0 && s.back() == ')') {
    if (auto d = grid::parse_door(s.substr(4, s.size() - 5))) return Action::trv(*d);
  }
  return std::nullopt;
}

std::vector<Action> applicable(const SymbolicBelief& b, const RoomGraph& g) {
  std::vector<Action> out;
  if (b.room == g.goal_in && !b.feature.is_goal()) out.push_back(Action::mv_goal());
  for (const Conn& c : g.conns)
    if (c.from_room == b.room) out.push_back(Action::trv(c.from_door));
  std::sort(out.begin(), out.end(),
            [](const Action& x, const Action& y) { return to_string(x) < to_string(y); });
  return out;
}

Result<SymbolicBelief> symbolic_transition(const SymbolicBelief& b, const Action& a, const RoomGraph& g) {
  if (a.kind == Action::Kind::MvGoal) {
    if (b.room != g.goal_in || b.feature.is_goal())
      return make_error(ErrorCode::Inapplicable, "mv_goal is not possible in " + describe(b));
    return SymbolicBelief{b.room, Feature::goal()};
  }
  const auto c = g.via(b.room, a.door);
  if (!c) return make_error(ErrorCode::Inapplicable, to_string(a) + " is not possible in " + describe(b));
  return SymbolicBelief{c->to_room, Feature::of_door(c->to_door)};
}

std::optional<long long> action_cost(const SymbolicBelief& b, const Action& a, const CostTables& costs) {
  const Feature target = a.target();
  if (b.feature.is_unknown()) {
    auto it = costs.ctf.find(target);
    if (it == costs.ctf.end()) return std::nullopt;
    return it->second;
  }
  auto it = costs.cbf.find({b.feature, target});
  if (it == costs.cbf.end()) return std::nullopt;
  return it->second;
}

std::vector<RoomId> Plan::rooms() const {
  std::vector<RoomId> out;
  for (const PlanStep& s : steps)
    if (out.empty() || out.back() != s.room) out.push_back(s.room);
  return out;
}

std::string plan_text(const Plan& p) {
  std::ostringstream os;
  for (const PlanStep& s : p.steps) os << s.time << ':' << to_string(s.action) << ':' << s.cost << '\n';
  os << "cost:" << p.total_cost << '\n';
  return os.str();
}

namespace {

struct Partial {
  long long cost = 0;
  std::vector<std::string> names;
  std::vector<PlanStep> steps;
  SymbolicBelief at;
};

struct Worse {
  bool operator()(const Partial& a, const Partial& b) const {
    const auto la = a.steps.size(), lb = b.steps.size();
    return std::tie(a.cost, la, a.names) > std::tie(b.cost, lb, b.names);
  }
};

}  // namespace

Result<Plan> plan_min_cost(const SymbolicBelief& b, const RoomGraph& g, const CostTables& costs, int horizon) {
  if (horizon < 1) return make_error(ErrorCode::NoPlan, "horizon must be at least 1");
  if (b.feature.is_goal()) return Plan{{}, 0, horizon};

  std::priority_queue<Partial, std::vector<Partial>, Worse> open;
  open.push(Partial{0, {}, {}, b});
  std::set<std::tuple<RoomId, Feature, std::size_t>> closed;
  while (!open.empty()) {
    Partial cur = open.top();
    open.pop();
    if (cur.at.feature.is_goal()) return Plan{std::move(cur.steps), cur.cost, horizon};
    if (!closed.insert({cur.at.room, cur.at.feature, cur.steps.size()}).second) continue;
    if (static_cast<int>(cur.steps.size()) >= horizon) continue;
    for (const Action& a : applicable(cur.at, g)) {
      const auto c = action_cost(cur.at, a, costs);
      if (!c) continue;
      auto next = symbolic_transition(cur.at, a, g);
      if (!next) continue;
      Partial ext = cur;
      ext.cost += *c;
      ext.names.push_back(to_string(a));
      ext.steps.push_back(PlanStep{a, static_cast<int>(cur.steps.size()), *c, cur.at.room});
      ext.at = *next;
      open.push(std::move(ext));
    }
  }
  return make_error(ErrorCode::NoPlan, "goal not reachable from " + describe(b) + " within " +
                                           std::to_string(horizon) + " actions");
}

std::string describe(const PlannerPolicy& p) {
  std::string out = "policy{";
  bool first = true;
  for (const auto& [room, a] : p.by_room) {
    out += (first ? "" : ",") + grid::to_string(room) + ":" + to_string(a);
    first = false;
  }
  return out + "}";
}

ValueSet planner_policy_apply(const PlannerPolicy& p, const SymbolicBelief& b) {
  if (b.feature.is_goal()) return {};
  auto it = p.by_room.find(b.room);
  if (it == p.by_room.end()) return {};
  return ValueSet::single(it->second);
}

std::string describe(const PlannerState& s) {
  std::string out = s.plan ? "plan[" + std::to_string(s.plan->steps.size()) + "," +
                                 std::to_string(s.plan->total_cost) + "]@" + std::to_string(s.cursor)
                           : std::string("noplan");
  if (s.costs) out += " " + describe(*s.costs);
  return out;
}

PlannerNode::PlannerNode(RoomGraph graph, int horizon, SymbolicBelief start)
    : graph_(std::move(graph)), horizon_(horizon), start_(start) {}

Value PlannerNode::observation_update(const Value& belief, const ValueSet& observations) const {
  for (const Value& o : observations)
    if (o.holds<SymbolicBelief>()) return o;
  return belief;
}

Value PlannerNode::transition_apply(const Value& model, const Value& belief, const ValueSet&,
                                    const ValueSet& actions) const {
  const auto* g = model.get_if<RoomGraph>();
  const auto* b = belief.get_if<SymbolicBelief>();
  if (!g || !b || actions.size() != 1) return belief;
  const auto* a = actions.front().get_if<Action>();
  if (!a) return belief;
  auto next = symbolic_transition(*b, *a, *g);
  if (!next) return belief;
  return Value::of(*next);
}

// The room graph is fixed.
Value PlannerNode::transition_learn(const Value& model, const Value&, const ValueSet&, const ValueSet&,
                                    const Value&) const {
  return model;
}

Value PlannerNode::utility_absorb(const Value& planning_state, const ValueSet& utilities) const {
  const auto* ps = planning_state.get_if<PlannerState>();
  if (!ps) return planning_state;
  for (const Value& u : utilities) {
    const auto* costs = u.get_if<CostTables>();
    if (!costs) continue;
    if (ps->costs == *costs) return planning_state;
    PlannerState next = *ps;
    next.costs = *costs;
    next.costs_changed = true;
    return Value::of(std::move(next));
  }
  return planning_state;
}

namespace {

PlannerPolicy policy_of(const Plan& p) {
  PlannerPolicy out;
  for (const PlanStep& s : p.steps) out.by_room.emplace(s.room, s.action);
  return out;
}

std::size_t cursor_of(const Plan& p, RoomId room) {
  for (std::size_t k = 0; k < p.steps.size(); ++k)
    if (p.steps[k].room == room) return k;
  return p.steps.size();
}

}  // namespace

PlanOutput PlannerNode::plan(const Value& policy, const Value& model, const ValueSet&, const Value& planning_state,
                             const Value& belief) const {
  const auto* ps = planning_state.get_if<PlannerState>();
  const auto* b = belief.get_if<SymbolicBelief>();
  const auto* g = model.get_if<RoomGraph>();
  if (!ps || !b || !g) return {policy, planning_state};
  if (!ps->costs) return {Value::of(PlannerPolicy{}), planning_state};

  PlannerState next = *ps;
  const bool off_plan = !next.plan || cursor_of(*next.plan, b->room) == next.plan->steps.size();
  const bool replan = next.costs_changed || (off_plan && !b->feature.is_goal());
  if (replan) {
    next.costs_changed = false;
    auto p = plan_min_cost(*b, *g, *next.costs, horizon_);
    ++next.replans;
    if (p) {
      next.plan = std::move(p).value();
      next.last_error.reset();
    } else {
      next.plan.reset();
      next.last_error = p.error();
    }
  }
  PlannerPolicy out;
  if (next.plan) {
    next.cursor = cursor_of(*next.plan, b->room);
    out = policy_of(*next.plan);
  } else {
    next.cursor = 0;
  }
  if (next == *ps && policy.holds<PlannerPolicy>() && policy.as<PlannerPolicy>() == out) return {policy, planning_state};
  return {Value::of(std::move(out)), Value::of(std::move(next))};
}

ValueSet PlannerNode::policy_apply(const Value& policy, const Value& belief) const {
  const auto* p = policy.get_if<PlannerPolicy>();
  const auto* b = belief.get_if<SymbolicBelief>();
  if (!p || !b) return {};
  return planner_policy_apply(*p, *b);
}

std::shared_ptr<const PlannerNode> planner_as_node(RoomGraph graph, int horizon, SymbolicBelief start) {
  return std::make_shared<const PlannerNode>(std::move(graph), horizon, start);
}

}  // namespace cogh::planner
