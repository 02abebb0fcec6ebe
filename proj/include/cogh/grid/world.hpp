#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cogh/core/hierarchy.hpp"
#include "cogh/core/result.hpp"

namespace cogh::grid {

struct RoomId {
  std::uint8_t n = 0;
  friend auto operator<=>(const RoomId&, const RoomId&) = default;
};

struct DoorLabel {
  std::uint8_t n = 0;
  friend auto operator<=>(const DoorLabel&, const DoorLabel&) = default;
};

struct GridPos {
  int x = 0;
  int y = 0;
  // Row-major: y first.
  friend auto operator<=>(const GridPos& a, const GridPos& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

std::string to_string(RoomId r);
std::string to_string(DoorLabel d);
std::string to_string(GridPos p);
std::optional<RoomId> parse_room(const std::string& s);
std::optional<DoorLabel> parse_door(const std::string& s);

// Compass directions; x grows east, y grows south.
enum class Direction : std::uint8_t { N, S, E, W };

inline constexpr Direction kDirections[] = {Direction::N, Direction::S, Direction::E, Direction::W};

GridPos offset(Direction d);
GridPos step(GridPos p, Direction d);
Direction left_of(Direction d);
Direction right_of(Direction d);
Direction opposite(Direction d);
char to_char(Direction d);
std::optional<Direction> direction_from_char(char c);
std::string describe(Direction d);

// A motor command: one of the four unit vectors.
struct Command {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Command&, const Command&) = default;
};

std::optional<Direction> direction_of(Command c);
Command command_of(Direction d);
std::string describe(const Command& c);

// Named locations inside a room that the upper levels reason about.
struct Feature {
  enum class Kind : std::uint8_t { Door, Goal, Unknown };
  Kind kind = Kind::Unknown;
  DoorLabel door{};

  static Feature of_door(DoorLabel d) { return {Kind::Door, d}; }
  static Feature goal() { return {Kind::Goal, {}}; }
  static Feature unknown() { return {Kind::Unknown, {}}; }

  bool is_door() const noexcept { return kind == Kind::Door; }
  bool is_goal() const noexcept { return kind == Kind::Goal; }
  bool is_unknown() const noexcept { return kind == Kind::Unknown; }

  friend auto operator<=>(const Feature&, const Feature&) = default;
};

std::string to_string(const Feature& f);
std::optional<Feature> parse_feature(const std::string& s);
inline std::string describe(const Feature& f) { return to_string(f); }

struct DoorRef {
  RoomId room;
  DoorLabel door;
  friend auto operator<=>(const DoorRef&, const DoorRef&) = default;
};

std::string to_string(const DoorRef& d);

// An undirected connection between two door cells in different rooms.
struct Doorway {
  DoorRef a;
  DoorRef b;
  friend auto operator<=>(const Doorway&, const Doorway&) = default;
};

enum class CellKind : std::uint8_t { Wall, Free, Door, Goal };

struct RoomGrid {
  std::vector<CellKind> cells;           // row-major, width * height
  std::map<GridPos, DoorLabel> doors;    // door cells and their labels
  friend bool operator==(const RoomGrid&, const RoomGrid&) = default;
};

// The rooms-and-doors projection shared by all rooms: which cells are
// traversable, where each door label sits and where the goal sits.
struct RoomTemplate {
  int width = 0;
  int height = 0;
  std::vector<bool> traversable;
  std::map<DoorLabel, GridPos> doors;
  std::optional<GridPos> goal;

  bool inside(GridPos p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
  bool is_traversable(GridPos p) const { return inside(p) && traversable[p.y * width + p.x]; }
  std::size_t traversable_count() const;
  std::optional<DoorLabel> door_at(GridPos p) const;
  // Direction that leaves the room from a door cell (its single blocked side).
  std::optional<Direction> outward(GridPos door_cell) const;
};

class WorldMap {
 public:
  WorldMap() = default;
  WorldMap(int width, int height) : width_(width), height_(height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  // Room blocks as laid out in the ASCII format: each band is a row of rooms.
  const std::vector<std::vector<RoomId>>& layout() const noexcept { return layout_; }
  void set_layout(std::vector<std::vector<RoomId>> layout) { layout_ = std::move(layout); }

  void add_room(RoomId id, RoomGrid grid) { rooms_[id] = std::move(grid); }
  const std::map<RoomId, RoomGrid>& rooms() const noexcept { return rooms_; }
  std::vector<RoomId> room_ids() const;
  bool has_room(RoomId r) const { return rooms_.count(r) != 0; }

  void add_doorway(Doorway d);
  const std::vector<Doorway>& doorways() const noexcept { return doorways_; }

  void set_goal(RoomId room, GridPos pos) { goal_room_ = room; goal_pos_ = pos; }
  RoomId goal_room() const noexcept { return goal_room_; }
  GridPos goal_pos() const noexcept { return goal_pos_; }

  bool inside(GridPos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  CellKind cell(RoomId r, GridPos p) const;
  bool traversable(RoomId r, GridPos p) const { return cell(r, p) != CellKind::Wall; }
  std::optional<DoorLabel> door_at(RoomId r, GridPos p) const;
  std::optional<GridPos> door_pos(RoomId r, DoorLabel d) const;
  std::optional<DoorRef> partner(DoorRef d) const;
  std::optional<Direction> outward(RoomId r, GridPos door_cell) const;
  Feature feature_at(RoomId r, GridPos p) const;
  std::size_t free_cell_count(RoomId r) const;

  // Unordered room adjacency implied by the doorways.
  std::vector<std::pair<RoomId, RoomId>> room_links() const;

  // Union of all rooms: shared wall mask, every door label at its position and
  // the goal cell. Meaningful when rooms share walls and label positions.
  RoomTemplate projected_template() const;

  friend bool operator==(const WorldMap&, const WorldMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::vector<RoomId>> layout_;
  std::map<RoomId, RoomGrid> rooms_;
  std::vector<Doorway> doorways_;  // kept sorted
  RoomId goal_room_{};
  GridPos goal_pos_{};
};

// Room-level links the navigation scenario is built around:
// r4-r1, r1-r2, r2-r3, r4-r5, r5-r3.
std::vector<std::pair<RoomId, RoomId>> required_room_links();

// Structural problems with a map, as human-readable lines; empty if the map
// satisfies every invariant (topology, 90 free cells per room, shared walls,
// consistent door positions, goal present).
std::vector<std::string> check_map(const WorldMap& map);

inline constexpr std::size_t kCellsPerRoom = 90;

// The five-room map used by the shipped scenario.
WorldMap canonical_map();
GridPos canonical_start();
inline constexpr RoomId kCanonicalStartRoom{4};

struct MotionModel {
  double p_intended = 0.8;
  double p_lateral() const { return (1.0 - p_intended) / 2.0; }
};

struct WorldState {
  std::shared_ptr<const WorldMap> map;
  RoomId room{};
  GridPos pos{};
  std::mt19937_64 rng;
  std::optional<Direction> last_command;  // direction commanded by the last step
  std::optional<Direction> last_actual;   // direction actually taken by it
  std::uint64_t steps = 0;               // motor commands executed so far

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return (a.map == b.map || (a.map && b.map && *a.map == *b.map)) && a.room == b.room && a.pos == b.pos &&
           a.rng == b.rng && a.last_command == b.last_command && a.last_actual == b.last_actual && a.steps == b.steps;
  }
};

std::string describe(const WorldState& s);

struct Location {
  RoomId room;
  GridPos pos;
  friend auto operator<=>(const Location&, const Location&) = default;
};

std::string describe(const Location& l);

// Draws the direction actually taken for `commanded`: intended with
// probability p, each lateral side with (1-p)/2, never the reverse.
Direction sample_direction(Direction commanded, const MotionModel& motion, std::mt19937_64& rng);

// Deterministic part of a step: where the robot ends up after moving in
// `actual`. Walls block; stepping out of a paired door cell through its
// outward side crosses into the partner room.
Location move(const WorldMap& map, Location from, Direction actual);

Result<WorldState> step_world(const WorldState& state, const MotionModel& motion, Command command);
Location sense_world(const WorldState& state);

Result<WorldState> make_world_state(std::shared_ptr<const WorldMap> map, RoomId room, GridPos start,
                                    std::uint64_t seed);

// The external world as the lowest node: all contracts are identities except
// actuation, which applies the received motor commands in order.
Result<std::shared_ptr<const NodeInterface>> world_as_node(std::shared_ptr<const WorldMap> map,
                                                           MotionModel motion, RoomId room, GridPos start,
                                                           std::uint64_t seed);

struct TrajectoryRow {
  std::size_t t = 0;
  Location location;
  std::optional<Direction> command;
  std::optional<Direction> actual;
};

// CSV with header `t,room,x,y,command,actual_dir`.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace cogh::grid
