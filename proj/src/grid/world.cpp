#include "cogh/grid/world.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cogh::grid {

std::string to_string(RoomId r) { return "r" + std::to_string(r.n); }
std::string to_string(DoorLabel d) { return "d" + std::to_string(d.n); }
std::string to_string(GridPos p) { return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")"; }

namespace {

std::optional<std::uint8_t> parse_indexed(const std::string& s, char prefix) {
  if (s.size() < 2 || s[0] != prefix) return std::nullopt;
  int v = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
    if (v > 255) return std::nullopt;
  }
  if (v == 0) return std::nullopt;
  return static_cast<std::uint8_t>(v);
}

}  // namespace

std::optional<RoomId> parse_room(const std::string& s) {
  if (auto n = parse_indexed(s, 'r')) return RoomId{*n};
  return std::nullopt;
}

std::optional<DoorLabel> parse_door(const std::string& s) {
  if (auto n = parse_indexed(s, 'd')) return DoorLabel{*n};
  return std::nullopt;
}

GridPos offset(Direction d) {
  switch (d) {
    case Direction::N: return {0, -1};
    case Direction::S: return {0, 1};
    case Direction::E: return {1, 0};
    case Direction::W: return {-1, 0};
  }
  return {0, 0};
}

GridPos step(GridPos p, Direction d) {
  const GridPos o = offset(d);
  return {p.x + o.x, p.y + o.y};
}

Direction left_of(Direction d) {
  switch (d) {
    case Direction::N: return Direction::W;
    case Direction::S: return Direction::E;
    case Direction::E: return Direction::N;
    case Direction::W: return Direction::S;
  }
  return d;
}

Direction right_of(Direction d) { return opposite(left_of(d)); }

Direction opposite(Direction d) {
  switch (d) {
    case Direction::N: return Direction::S;
    case Direction::S: return Direction::N;
    case Direction::E: return Direction::W;
    case Direction::W: return Direction::E;
  }
  return d;
}

char to_char(Direction d) { return "NSEW"[static_cast<int>(d)]; }

std::string describe(Direction d) { return std::string(1, to_char(d)); }

std::optional<Direction> direction_from_char(char c) {
  switch (c) {
    case 'N': return Direction::N;
    case 'S': return Direction::S;
    case 'E': return Direction::E;
    case 'W': return Direction::W;
    default: return std::nullopt;
  }
}

std::optional<Direction> direction_of(Command c) {
  for (Direction d : kDirections) {
    const GridPos o = offset(d);
    if (o.x == c.dx && o.y == c.dy) return d;
  }
  return std::nullopt;
}

Command command_of(Direction d) {
  const GridPos o = offset(d);
  return {o.x, o.y};
}

std::string describe(const Command& c) {
  return "<" + std::to_string(c.dx) + "," + std::to_string(c.dy) + ">";
}

std::string to_string(const Feature& f) {
  switch (f.kind) {
    case Feature::Kind::Door: return to_string(f.door);
    case Feature::Kind::Goal: return "goal";
    case Feature::Kind::Unknown: return "unkn";
  }
  return "unkn";
}

std::optional<Feature> parse_feature(const std::string& s) {
  if (s == "goal") return Feature::goal();
  if (s == "unkn") return Feature::unknown();
  if (auto d = parse_door(s)) return Feature::of_door(*d);
  return std::nullopt;
}

std::string to_string(const DoorRef& d) { return to_string(d.room) + "." + to_string(d.door); }

std::size_t RoomTemplate::traversable_count() const {
  return static_cast<std::size_t>(std::count(traversable.begin(), traversable.end(), true));
}

std::optional<DoorLabel> RoomTemplate::door_at(GridPos p) const {
  for (const auto& [label, pos] : doors)
    if (pos == p) return label;
  return std::nullopt;
}

std::optional<Direction> RoomTemplate::outward(GridPos door_cell) const {
  std::optional<Direction> out;
  for (Direction d : kDirections) {
    if (is_traversable(step(door_cell, d))) continue;
    if (out) return std::nullopt;  // more than one blocked side
    out = d;
  }
  return out;
}

std::vector<RoomId> WorldMap::room_ids() const {
  std::vector<RoomId> ids;
  for (const auto& [id, _] : rooms_) ids.push_back(id);
  return ids;
}

void WorldMap::add_doorway(Doorway d) {
  if (d.b < d.a) std::swap(d.a, d.b);
  doorways_.insert(std::upper_bound(doorways_.begin(), doorways_.end(), d), d);
}

CellKind WorldMap::cell(RoomId r, GridPos p) const {
  auto it = rooms_.find(r);
  if (it == rooms_.end() || !inside(p)) return CellKind::Wall;
  return it->second.cells[static_cast<std::size_t>(p.y * width_ + p.x)];
}

std::optional<DoorLabel> WorldMap::door_at(RoomId r, GridPos p) const {
  auto it = rooms_.find(r);
  if (it == rooms_.end()) return std::nullopt;
  auto d = it->second.doors.find(p);
  if (d == it->second.doors.end()) return std::nullopt;
  return d->second;
}

std::optional<GridPos> WorldMap::door_pos(RoomId r, DoorLabel d) const {
  auto it = rooms_.find(r);
  if (it == rooms_.end()) return std::nullopt;
  for (const auto& [pos, label] : it->second.doors)
    if (label == d) return pos;
  return std::nullopt;
}

std::optional<DoorRef> WorldMap::partner(DoorRef d) const {
  for (const auto& w : doorways_) {
    if (w.a == d) return w.b;
    if (w.b == d) return w.a;
  }
  return std::nullopt;
}

std::optional<Direction> WorldMap::outward(RoomId r, GridPos door_cell) const {
  std::optional<Direction> out;
  for (Direction d : kDirections) {
    if (traversable(r, step(door_cell, d))) continue;
    if (out) return std::nullopt;
    out = d;
  }
  return out;
}

Feature WorldMap::feature_at(RoomId r, GridPos p) const {
  if (r == goal_room_ && p == goal_pos_) return Feature::goal();
  if (auto d = door_at(r, p)) return Feature::of_door(*d);
  return Feature::unknown();
}

std::size_t WorldMap::free_cell_count(RoomId r) const {
  auto it = rooms_.find(r);
  if (it == rooms_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.cells.begin(), it->second.cells.end(), [](CellKind k) { return k != CellKind::Wall; }));
}

std::vector<std::pair<RoomId, RoomId>> WorldMap::room_links() const {
  std::set<std::pair<RoomId, RoomId>> links;
  for (const auto& w : doorways_) {
    auto a = w.a.room, b = w.b.room;
    if (b < a) std::swap(a, b);
    links.insert({a, b});
  }
  return {links.begin(), links.end()};
}

RoomTemplate WorldMap::projected_template() const {
  RoomTemplate t;
  t.width = width_;
  t.height = height_;
  t.traversable.assign(static_cast<std::size_t>(width_ * height_), false);
  for (const auto& [id, grid] : rooms_) {
    for (std::size_t k = 0; k < grid.cells.size() && k < t.traversable.size(); ++k)
      if (grid.cells[k] != CellKind::Wall) t.traversable[k] = true;
    for (const auto& [pos, label] : grid.doors) t.doors.emplace(label, pos);
  }
  if (has_room(goal_room_)) t.goal = goal_pos_;
  return t;
}

std::vector<std::pair<RoomId, RoomId>> required_room_links() {
  std::vector<std::pair<RoomId, RoomId>> links = {
      {RoomId{1}, RoomId{4}}, {RoomId{1}, RoomId{2}}, {RoomId{2}, RoomId{3}},
      {RoomId{4}, RoomId{5}}, {RoomId{3}, RoomId{5}},
  };
  std::sort(links.begin(), links.end());
  return links;
}

std::vector<std::string> check_map(const WorldMap& map) {
  std::vector<std::string> issues;
  const auto ids = map.room_ids();
  if (ids.size() != 5) issues.push_back("expected 5 rooms, found " + std::to_string(ids.size()));
  for (auto r : ids) {
    if (map.free_cell_count(r) != kCellsPerRoom)
      issues.push_back(to_string(r) + " has " + std::to_string(map.free_cell_count(r)) + " free cells, expected " +
                       std::to_string(kCellsPerRoom));
  }
  if (map.room_links() != required_room_links()) issues.push_back("room connections do not match r4-r1, r1-r2, r2-r3, r4-r5, r5-r3");

  if (!map.has_room(map.goal_room()) || map.cell(map.goal_room(), map.goal_pos()) != CellKind::Goal)
    issues.push_back("goal cell missing");

  // Rooms must be identical apart from which door labels are open.
  std::optional<std::vector<bool>> mask;
  std::map<DoorLabel, GridPos> label_pos;
  for (const auto& [id, grid] : map.rooms()) {
    std::vector<bool> m;
    for (auto k : grid.cells) m.push_back(k != CellKind::Wall);
    if (!mask) mask = m;
    else if (*mask != m) issues.push_back(to_string(id) + " wall layout differs from the other rooms");
    for (const auto& [pos, label] : grid.doors) {
      auto [it, fresh] = label_pos.emplace(label, pos);
      if (!fresh && it->second != pos)
        issues.push_back(to_string(DoorRef{id, label}) + " is not at the same position as in other rooms");
      if (!map.outward(id, pos)) issues.push_back(to_string(DoorRef{id, label}) + " must have exactly one blocked side");
      if (!map.partner({id, label})) issues.push_back(to_string(DoorRef{id, label}) + " is not paired");
    }
  }
  for (const auto& w : map.doorways()) {
    if (!map.door_pos(w.a.room, w.a.door) || !map.door_pos(w.b.room, w.b.door))
      issues.push_back("doorway " + to_string(w.a) + " " + to_string(w.b) + " references a missing door");
    if (w.a.room == w.b.room) issues.push_back("doorway " + to_string(w.a) + " " + to_string(w.b) + " stays in one room");
  }
  return issues;
}

// Each room is a 10x11 block whose last column and last row are wall, leaving
// a 9x10 open floor. Door labels sit on the floor's rim; a room only opens the
// labels it is paired through.
//
//   layout          r1  r2
//                   r4  r5  r3
WorldMap canonical_map() {
  constexpr int kWidth = 10;
  constexpr int kHeight = 11;
  const std::map<std::uint8_t, GridPos> positions = {
      {1, {8, 7}}, {2, {0, 7}}, {3, {8, 1}}, {4, {4, 9}}, {5, {1, 9}}, {6, {5, 0}},
  };
  const std::vector<std::pair<DoorRef, DoorRef>> pairs = {
      {{RoomId{1}, DoorLabel{4}}, {RoomId{2}, DoorLabel{3}}},
      {{RoomId{1}, DoorLabel{6}}, {RoomId{4}, DoorLabel{1}}},
      {{RoomId{5}, DoorLabel{2}}, {RoomId{3}, DoorLabel{5}}},
      {{RoomId{2}, DoorLabel{1}}, {RoomId{3}, DoorLabel{1}}},
      {{RoomId{4}, DoorLabel{5}}, {RoomId{5}, DoorLabel{6}}},
  };
  const GridPos goal{6, 0};

  WorldMap map(kWidth, kHeight);
  map.set_layout({{RoomId{1}, RoomId{2}}, {RoomId{4}, RoomId{5}, RoomId{3}}});
  for (std::uint8_t r = 1; r <= 5; ++r) {
    RoomGrid grid;
    grid.cells.assign(kWidth * kHeight, CellKind::Wall);
    for (int y = 0; y < kHeight - 1; ++y)
      for (int x = 0; x < kWidth - 1; ++x) grid.cells[y * kWidth + x] = CellKind::Free;
    map.add_room(RoomId{r}, std::move(grid));
  }
  std::map<RoomId, RoomGrid> rooms = map.rooms();
  for (const auto& [a, b] : pairs) {
    for (const DoorRef& d : {a, b}) {
      const GridPos p = positions.at(d.door.n);
      rooms[d.room].cells[p.y * kWidth + p.x] = CellKind::Door;
      rooms[d.room].doors[p] = d.door;
    }
    map.add_doorway({a, b});
  }
  rooms[RoomId{3}].cells[goal.y * kWidth + goal.x] = CellKind::Goal;
  for (auto& [id, grid] : rooms) map.add_room(id, std::move(grid));
  map.set_goal(RoomId{3}, goal);
  return map;
}

GridPos canonical_start() { return {8, 0}; }

std::string describe(const WorldState& s) { return to_string(s.room) + to_string(s.pos); }
std::string describe(const Location& l) { return to_string(l.room) + to_string(l.pos); }

Direction sample_direction(Direction commanded, const MotionModel& motion, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < motion.p_intended) return commanded;
  if (u < motion.p_intended + motion.p_lateral()) return left_of(commanded);
  return right_of(commanded);
}

Location move(const WorldMap& map, Location from, Direction actual) {
  const GridPos target = step(from.pos, actual);
  if (map.traversable(from.room, target)) return {from.room, target};
  if (auto label = map.door_at(from.room, from.pos)) {
    if (map.outward(from.room, from.pos) == actual) {
      if (auto other = map.partner({from.room, *label})) {
        if (auto pos = map.door_pos(other->room, other->door)) return {other->room, *pos};
      }
    }
  }
  return from;
}

Result<WorldState> step_world(const WorldState& state, const MotionModel& motion, Command command) {
  const auto commanded = direction_of(command);
  if (!commanded)
    return make_error(ErrorCode::InvalidCommand, "command " + describe(command) + " is not a unit vector");
  WorldState next = state;
  const Direction actual = sample_direction(*commanded, motion, next.rng);
  const Location to = move(*state.map, {state.room, state.pos}, actual);
  next.room = to.room;
  next.pos = to.pos;
  next.last_command = *commanded;
  next.last_actual = actual;
  ++next.steps;
  return next;
}

Location sense_world(const WorldState& state) { return {state.room, state.pos}; }

Result<WorldState> make_world_state(std::shared_ptr<const WorldMap> map, RoomId room, GridPos start,
                                    std::uint64_t seed) {
  if (!map || !map->has_room(room) || !map->traversable(room, start))
    return make_error(ErrorCode::InvalidStart, to_string(room) + to_string(start) + " is not a free cell");
  WorldState s;
  s.map = std::move(map);
  s.room = room;
  s.pos = start;
  s.rng.seed(seed);
  return s;
}

namespace {

class WorldNode final : public NodeInterface {
 public:
  WorldNode(WorldState initial, MotionModel motion) : initial_(std::move(initial)), motion_(motion) {}

  std::string name() const override { return "world"; }

  Value observation_update(const Value& belief, const ValueSet&) const override { return belief; }
  Value transition_apply(const Value&, const Value& belief, const ValueSet&, const ValueSet&) const override {
    return belief;
  }
  Value transition_learn(const Value& model, const Value&, const ValueSet&, const ValueSet&,
                         const Value&) const override {
    return model;
  }
  Value utility_absorb(const Value& ps, const ValueSet&) const override { return ps; }
  PlanOutput plan(const Value& policy, const Value&, const ValueSet&, const Value& ps, const Value&) const override {
    return {policy, ps};
  }
  ValueSet policy_apply(const Value&, const Value&) const override { return {}; }

  Value initial_belief() const override { return Value::of(initial_); }
  Value initial_policy() const override { return {}; }
  Value initial_transition_model() const override { return {}; }
  Value initial_planning_state() const override { return {}; }

  Value actuate(const Value& belief, const ValueSet& commands) const override {
    const auto* state = belief.get_if<WorldState>();
    if (!state || commands.empty()) return belief;
    WorldState current = *state;
    for (const Value& v : commands) {
      const auto* c = v.get_if<Command>();
      if (!c) continue;
      auto next = step_world(current, motion_, *c);
      if (next) current = std::move(next).value();
    }
    return Value::of(std::move(current));
  }

 private:
  WorldState initial_;
  MotionModel motion_;
};

}  // namespace

Result<std::shared_ptr<const NodeInterface>> world_as_node(std::shared_ptr<const WorldMap> map, MotionModel motion,
                                                           RoomId room, GridPos start, std::uint64_t seed) {
  auto state = make_world_state(std::move(map), room, start, seed);
  if (!state) return state.error();
  return std::shared_ptr<const NodeInterface>(std::make_shared<WorldNode>(std::move(state).value(), motion));
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os << "t,room,x,y,command,actual_dir\n";
  for (const auto& r : rows) {
    os << r.t << ',' << to_string(r.location.room) << ',' << r.location.pos.x << ',' << r.location.pos.y << ','
       << (r.command ? std::string(1, to_char(*r.command)) : std::string("-")) << ','
       << (r.actual ? std::string(1, to_char(*r.actual)) : std::string("-")) << '\n';
  }
  return os.str();
}

}  // namespace cogh::grid
