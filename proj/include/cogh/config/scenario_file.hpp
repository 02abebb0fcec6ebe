#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cogh/core/result.hpp"
#include "cogh/nav/scenario.hpp"

namespace cogh::config {

// 1-based line and column (bytes) in the source text.
struct SourcePos {
  int line = 1;
  int column = 1;
  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

enum class ParseErrorKind {
  Syntax,
  UnknownChar,
  UnknownKey,
  DuplicateMarker,
  CellCount,
  BadDoor,
  BadPairing,
  TopologyMismatch,
  MissingGoal,
  MissingRobot,
  BadParamValue,
  Io,  // the file could not be read
};

const char* to_string(ParseErrorKind k);
// True for errors about map structure rather than text syntax.
bool is_validation_error(ParseErrorKind k);

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::Syntax;
  SourcePos at;
  std::string message;

  // "line:column: Kind: message"
  std::string str() const;
};

// A parsed file: the scenario plus where its parts came from.
struct ScenarioDoc {
  nav::Scenario scenario;
  SourcePos map_header;
  std::map<grid::RoomId, SourcePos> room_origin;  // position of each room's (0,0) cell
  std::map<std::string, SourcePos> params;         // position of each key that was set

  // Source position of a room cell.
  std::optional<SourcePos> cell_source(grid::RoomId room, grid::GridPos p) const;
};

// Grammar, line oriented, `;` to end of line is a comment:
//
//   [map]
//   rooms: r1 r2          ; starts a band of rooms laid side by side
//   #.........|..........  ; one text row per room row, rooms split by '|'
//   pair: r1.d4 r2.d3
//   [params]
//   p_intended = 0.8
//   [hierarchy]            ; optional, replaces the default wiring
//   edge: n0 -> n1
//
// Cells: '#' wall, '.' free, '1'-'9' door, 'G' goal, 'R' robot start.
Result<ScenarioDoc, ParseError> parse_scenario(std::string_view text);

// Canonical text. Parameters come sorted by key; ones at their default value
// are written commented out.
std::string render_scenario(const nav::Scenario& s);

Result<ScenarioDoc, ParseError> load_scenario(const std::string& path);

// Parameter keys, sorted.
const std::vector<std::string>& param_keys();

}  // namespace cogh::config
