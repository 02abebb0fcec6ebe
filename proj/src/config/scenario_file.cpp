#include "cogh/config/scenario_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace cogh::config {

using grid::CellKind;
using grid::DoorLabel;
using grid::DoorRef;
using grid::GridPos;
using grid::RoomId;

const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Syntax: return "Syntax";
    case ParseErrorKind::UnknownChar: return "UnknownChar";
    case ParseErrorKind::UnknownKey: return "UnknownKey";
    case ParseErrorKind::DuplicateMarker: return "DuplicateMarker";
    case ParseErrorKind::CellCount: return "CellCount";
    case ParseErrorKind::BadDoor: return "BadDoor";
    case ParseErrorKind::BadPairing: return "BadPairing";
    case ParseErrorKind::TopologyMismatch: return "TopologyMismatch";
    case ParseErrorKind::MissingGoal: return "MissingGoal";
    case ParseErrorKind::MissingRobot: return "MissingRobot";
    case ParseErrorKind::BadParamValue: return "BadParamValue";
    case ParseErrorKind::Io: return "Io";
  }
  return "?";
}

bool is_validation_error(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::BadDoor:
    case ParseErrorKind::BadPairing:
    case ParseErrorKind::TopologyMismatch:
    case ParseErrorKind::MissingGoal:
    case ParseErrorKind::MissingRobot:
      return true;
    default:
      return false;
  }
}

std::string ParseError::str() const {
  return std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + to_string(kind) + ": " + message;
}

std::optional<SourcePos> ScenarioDoc::cell_source(RoomId room, GridPos p) const {
  auto it = room_origin.find(room);
  if (it == room_origin.end() || p.x < 0 || p.y < 0 || (scenario.map && !scenario.map->inside(p))) return std::nullopt;
  return SourcePos{it->second.line + p.y, it->second.column + p.x};
}

namespace {

// ---- number formatting and parsing ----

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class T>
std::optional<T> to_integer(std::string_view s) {
  T v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

// ---- parameters ----

struct Param {
  std::string key;
  std::function<std::string(const nav::Scenario&)> get;
  // Returns an error message, or empty on success.
  std::function<std::string(nav::Scenario&, std::string_view)> set;
};

template <class F>
Param real_param(std::string key, F field, double lo, double hi, bool lo_open) {
  return Param{key, [field](const nav::Scenario& s) {
                 nav::Scenario c = s;
                 return format_double(field(c));
               },
               [field, lo, hi, lo_open](nav::Scenario& s, std::string_view v) -> std::string {
                 auto d = to_double(v);
                 if (!d) return "expected a number";
                 if (*d > hi || *d < lo || (lo_open && *d == lo)) {
                   return std::string("must be in ") + (lo_open ? "(" : "[") + format_double(lo) + ", " +
                          format_double(hi) + "]";
                 }
                 field(s) = *d;
                 return {};
               }};
}

template <class F>
Param int_param(std::string key, F field, int lo) {
  return Param{key, [field](const nav::Scenario& s) {
                 nav::Scenario c = s;
                 return std::to_string(field(c));
               },
               [field, lo](nav::Scenario& s, std::string_view v) -> std::string {
                 auto n = to_integer<int>(v);
                 if (!n) return "expected an integer";
                 if (*n < lo) return "must be at least " + std::to_string(lo);
                 field(s) = *n;
                 return {};
               }};
}

const std::vector<Param>& params() {
  static const std::vector<Param> table = [] {
    constexpr double kHuge = 1e300;
    std::vector<Param> t;
    t.push_back(real_param("alpha", [](nav::Scenario& s) -> double& { return s.learner.alpha; }, 0.0, 1.0, true));
    t.push_back(real_param("epsilon", [](nav::Scenario& s) -> double& { return s.learner.epsilon; }, 0.0, 1.0, false));
    t.push_back(real_param("exit_penalty", [](nav::Scenario& s) -> double& { return s.learner.exit_penalty; }, 0.0,
                           kHuge, false));
    t.push_back(real_param("gamma", [](nav::Scenario& s) -> double& { return s.learner.gamma; }, 0.0, 1.0, true));
    t.push_back(int_param("horizon", [](nav::Scenario& s) -> int& { return s.horizon; }, 1));
    t.push_back(int_param("max_steps", [](nav::Scenario& s) -> int& { return s.max_steps; }, 1));
    t.push_back(int_param("max_sweeps", [](nav::Scenario& s) -> int& { return s.learner.max_sweeps; }, 1));
    t.push_back(Param{"one_step_td", [](const nav::Scenario& s) { return std::string(s.learner.one_step_td ? "true" : "false"); },
                      [](nav::Scenario& s, std::string_view v) -> std::string {
                        auto b = to_bool(v);
                        if (!b) return "expected true or false";
                        s.learner.one_step_td = *b;
                        return {};
                      }});
    t.push_back(real_param("p_intended", [](nav::Scenario& s) -> double& { return s.motion.p_intended; }, 0.0, 1.0,
                           false));
    t.push_back(Param{"seed", [](const nav::Scenario& s) { return std::to_string(s.seed); },
                      [](nav::Scenario& s, std::string_view v) -> std::string {
                        auto n = to_integer<std::uint64_t>(v);
                        if (!n) return "expected an unsigned 64-bit integer";
                        s.seed = *n;
                        return {};
                      }});
    t.push_back(real_param("tolerance", [](nav::Scenario& s) -> double& { return s.learner.tolerance; }, 0.0, kHuge,
                           true));
    return t;
  }();
  return table;
}

const Param* find_param(std::string_view key) {
  for (const Param& p : params())
    if (p.key == key) return &p;
  return nullptr;
}

// ---- lexing helpers ----

struct Line {
  int number = 0;
  std::string_view text;  // comment and trailing blanks removed
};

bool blank(char c) { return c == ' ' || c == '\t'; }

std::string_view strip_comment(std::string_view s) {
  if (auto k = s.find(';'); k != std::string_view::npos) s = s.substr(0, k);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  int n = 1;
  while (true) {
    auto k = text.find('\n');
    std::string_view raw = text.substr(0, k);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    out.push_back({n, strip_comment(raw)});
    if (k == std::string_view::npos) break;
    text.remove_prefix(k + 1);
    ++n;
  }
  return out;
}

int first_non_blank(std::string_view s) {
  int i = 0;
  while (i < static_cast<int>(s.size()) && blank(s[static_cast<std::size_t>(i)])) ++i;
  return i;
}

struct Token {
  std::string_view text;
  int column = 1;
};

std::vector<Token> words(std::string_view s, int base_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && blank(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !blank(s[i])) ++i;
    if (i > start) out.push_back({s.substr(start, i - start), base_column + static_cast<int>(start)});
  }
  return out;
}

ParseError err(ParseErrorKind k, int line, int column, std::string msg) {
  return ParseError{k, SourcePos{line, std::max(column, 1)}, std::move(msg)};
}

std::optional<DoorRef> parse_door_ref(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto r = grid::parse_room(std::string(s.substr(0, dot)));
  auto d = grid::parse_door(std::string(s.substr(dot + 1)));
  if (!r || !d || r->n == 0 || d->n == 0) return std::nullopt;
  return DoorRef{*r, *d};
}

std::optional<std::uint32_t> parse_node(std::string_view s) {
  if (s.size() < 2 || s[0] != 'n') return std::nullopt;
  return to_integer<std::uint32_t>(s.substr(1));
}

// ---- map assembly ----

struct PendingPair {
  DoorRef a;
  DoorRef b;
  int line;
  int column_a;
  int column_b;
};

struct Band {
  std::vector<RoomId> rooms;
  int header_line = 0;
  std::vector<Line> rows;
};

}  // namespace

Result<ScenarioDoc, ParseError> parse_scenario(std::string_view text) {
  const auto lines = split_lines(text);
  enum class Section { None, Map, Params, Hierarchy };
  Section section = Section::None;

  ScenarioDoc doc;
  nav::Scenario& s = doc.scenario;
  bool seen_map = false, seen_params = false, seen_hierarchy = false;
  std::vector<Band> bands;
  std::vector<PendingPair> pairs;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  for (const Line& ln : lines) {
    const std::string_view t = ln.text;
    const int lead = first_non_blank(t);
    if (lead == static_cast<int>(t.size())) continue;
    const std::string_view body = t.substr(static_cast<std::size_t>(lead));
    const int col0 = lead + 1;

    if (body.front() == '[') {
      Section next = Section::None;
      bool* seen = nullptr;
      if (body == "[map]") next = Section::Map, seen = &seen_map;
      else if (body == "[params]") next = Section::Params, seen = &seen_params;
      else if (body == "[hierarchy]") next = Section::Hierarchy, seen = &seen_hierarchy;
      else return err(ParseErrorKind::Syntax, ln.number, col0, "unknown section " + std::string(body));
      if (*seen) return err(ParseErrorKind::Syntax, ln.number, col0, "section " + std::string(body) + " repeated");
      *seen = true;
      section = next;
      if (next == Section::Map) doc.map_header = {ln.number, col0};
      continue;
    }

    switch (section) {
      case Section::None:
        return err(ParseErrorKind::Syntax, ln.number, col0, "text before the first section");

      case Section::Map: {
        if (body.rfind("rooms:", 0) == 0) {
          Band band;
          band.header_line = ln.number;
          for (const Token& w : words(body.substr(6), col0 + 6)) {
            auto r = grid::parse_room(std::string(w.text));
            if (!r || r->n == 0) return err(ParseErrorKind::Syntax, ln.number, w.column, "expected a room name like r1");
            for (const Band& b : bands)
              for (RoomId q : b.rooms)
                if (q == *r) return err(ParseErrorKind::DuplicateMarker, ln.number, w.column, "room listed twice");
            for (RoomId q : band.rooms)
              if (q == *r) return err(ParseErrorKind::DuplicateMarker, ln.number, w.column, "room listed twice");
            band.rooms.push_back(*r);
          }
          if (band.rooms.empty()) return err(ParseErrorKind::Syntax, ln.number, col0, "rooms: needs at least one room");
          bands.push_back(std::move(band));
        } else if (body.rfind("pair:", 0) == 0) {
          const auto w = words(body.substr(5), col0 + 5);
          if (w.size() != 2) return err(ParseErrorKind::Syntax, ln.number, col0, "pair: needs two door references");
          auto a = parse_door_ref(w[0].text);
          if (!a) return err(ParseErrorKind::Syntax, ln.number, w[0].column, "expected a door reference like r1.d4");
          auto b = parse_door_ref(w[1].text);
          if (!b) return err(ParseErrorKind::Syntax, ln.number, w[1].column, "expected a door reference like r1.d4");
          pairs.push_back({*a, *b, ln.number, w[0].column, w[1].column});
        } else {
          if (bands.empty()) return err(ParseErrorKind::Syntax, ln.number, col0, "map row before any rooms: line");
          bands.back().rows.push_back(ln);
        }
        break;
      }

      case Section::Params: {
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) return err(ParseErrorKind::Syntax, ln.number, col0, "expected key = value");
        std::string_view key = body.substr(0, eq);
        while (!key.empty() && blank(key.back())) key.remove_suffix(1);
        std::string_view rest = body.substr(eq + 1);
        const int vlead = first_non_blank(rest);
        const std::string_view value = rest.substr(static_cast<std::size_t>(vlead));
        const int vcol = col0 + static_cast<int>(eq) + 1 + vlead;
        if (key.empty()) return err(ParseErrorKind::Syntax, ln.number, col0, "missing key");
        const Param* p = find_param(key);
        if (!p) return err(ParseErrorKind::UnknownKey, ln.number, col0, "unknown key " + std::string(key));
        if (doc.params.count(std::string(key)))
          return err(ParseErrorKind::Syntax, ln.number, col0, "key " + std::string(key) + " set twice");
        if (value.empty()) return err(ParseErrorKind::BadParamValue, ln.number, vcol, "missing value");
        if (auto msg = p->set(s, value); !msg.empty())
          return err(ParseErrorKind::BadParamValue, ln.number, vcol, std::string(key) + ": " + msg);
        doc.params[std::string(key)] = {ln.number, col0};
        break;
      }

      case Section::Hierarchy: {
        if (body.rfind("edge:", 0) != 0) return err(ParseErrorKind::Syntax, ln.number, col0, "expected edge: nA -> nB");
        const auto w = words(body.substr(5), col0 + 5);
        if (w.size() != 3 || w[1].text != "->")
          return err(ParseErrorKind::Syntax, ln.number, col0, "expected edge: nA -> nB");
        auto a = parse_node(w[0].text);
        if (!a) return err(ParseErrorKind::Syntax, ln.number, w[0].column, "expected a node name like n0");
        auto b = parse_node(w[2].text);
        if (!b) return err(ParseErrorKind::Syntax, ln.number, w[2].column, "expected a node name like n0");
        edges.emplace_back(*a, *b);
        break;
      }
    }
  }

  if (!seen_map) return err(ParseErrorKind::Syntax, 1, 1, "missing [map] section");
  if (bands.empty())
    return err(ParseErrorKind::Syntax, doc.map_header.line, doc.map_header.column, "map has no rooms: line");
  if (seen_hierarchy) s.wiring = edges;

  // Room geometry: every room the same size.
  int width = -1;
  const int height = static_cast<int>(bands.front().rows.size());
  for (const Band& b : bands) {
    if (b.rows.empty())
      return err(ParseErrorKind::CellCount, b.header_line, 1, "band has no rows");
    if (static_cast<int>(b.rows.size()) != height)
      return err(ParseErrorKind::CellCount, b.header_line, 1,
                 "band has " + std::to_string(b.rows.size()) + " rows, expected " + std::to_string(height));
  }

  grid::WorldMap scratch;  // dimensions fixed once the first row is read
  std::map<RoomId, grid::RoomGrid> grids;
  std::optional<std::pair<RoomId, GridPos>> goal, robot;
  SourcePos goal_at, robot_at;
  for (const Band& b : bands) {
    for (int y = 0; y < height; ++y) {
      const Line& row = b.rows[static_cast<std::size_t>(y)];
      std::string_view t = row.text;
      std::vector<std::pair<std::string_view, int>> segs;
      std::size_t start = 0;
      while (true) {
        auto k = t.find('|', start);
        segs.emplace_back(t.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start),
                          static_cast<int>(start) + 1);
        if (k == std::string_view::npos) break;
        start = k + 1;
      }
      if (segs.size() != b.rooms.size())
        return err(ParseErrorKind::CellCount, row.number, 1,
                   "row has " + std::to_string(segs.size()) + " rooms, expected " + std::to_string(b.rooms.size()));
      for (std::size_t r = 0; r < segs.size(); ++r) {
        const auto [seg, seg_col] = segs[r];
        if (width < 0) {
          width = static_cast<int>(seg.size());
          if (width == 0) return err(ParseErrorKind::CellCount, row.number, seg_col, "empty room row");
        }
        if (static_cast<int>(seg.size()) != width)
          return err(ParseErrorKind::CellCount, row.number, seg_col,
                     "room row is " + std::to_string(seg.size()) + " cells wide, expected " + std::to_string(width));
        const RoomId room = b.rooms[r];
        auto& g = grids[room];
        if (g.cells.empty()) {
          g.cells.assign(static_cast<std::size_t>(width * height), CellKind::Wall);
          doc.room_origin[room] = {row.number, seg_col};
        }
        for (int x = 0; x < width; ++x) {
          const char c = seg[static_cast<std::size_t>(x)];
          const int col = seg_col + x;
          const GridPos p{x, y};
          CellKind kind = CellKind::Wall;
          if (c == '#') kind = CellKind::Wall;
          else if (c == '.') kind = CellKind::Free;
          else if (c == 'G' || c == 'R') {
            auto& slot = c == 'G' ? goal : robot;
            if (slot) return err(ParseErrorKind::DuplicateMarker, row.number, col, std::string("second ") + c + " marker");
            slot = {room, p};
            (c == 'G' ? goal_at : robot_at) = {row.number, col};
            kind = c == 'G' ? CellKind::Goal : CellKind::Free;
          } else if (c >= '1' && c <= '9') {
            const DoorLabel d{static_cast<std::uint8_t>(c - '0')};
            for (const auto& [q, label] : g.doors)
              if (label == d)
                return err(ParseErrorKind::DuplicateMarker, row.number, col,
                           "door " + grid::to_string(d) + " appears twice in " + grid::to_string(room));
            g.doors[p] = d;
            kind = CellKind::Door;
          } else {
            return err(ParseErrorKind::UnknownChar, row.number, col,
                       "unexpected character '" + std::string(1, c) + "'");
          }
          g.cells[static_cast<std::size_t>(y * width + x)] = kind;
        }
      }
    }
  }

  auto map = std::make_shared<grid::WorldMap>(width, height);
  std::vector<std::vector<RoomId>> layout;
  for (const Band& b : bands) layout.push_back(b.rooms);
  map->set_layout(layout);
  for (auto& [id, g] : grids) map->add_room(id, std::move(g));

  // Each door must have exactly one blocked side.
  for (const auto& [id, g] : map->rooms()) {
    for (const auto& [p, label] : g.doors) {
      if (!map->outward(id, p)) {
        const auto at = doc.cell_source(id, p).value_or(doc.map_header);
        return err(ParseErrorKind::BadDoor, at.line, at.column,
                   grid::to_string(DoorRef{id, label}) + " needs exactly one blocked side");
      }
    }
  }

  std::set<DoorRef> paired;
  for (const PendingPair& pp : pairs) {
    for (const auto& [d, col] : {std::pair{pp.a, pp.column_a}, std::pair{pp.b, pp.column_b}}) {
      if (!map->door_pos(d.room, d.door))
        return err(ParseErrorKind::BadPairing, pp.line, col, grid::to_string(d) + " is not a door on the map");
      if (!paired.insert(d).second)
        return err(ParseErrorKind::BadPairing, pp.line, col, grid::to_string(d) + " is paired twice");
    }
    if (pp.a.room == pp.b.room)
      return err(ParseErrorKind::BadPairing, pp.line, pp.column_a, "a pair must join two different rooms");
    map->add_doorway({pp.a, pp.b});
  }

  if (!goal) return err(ParseErrorKind::MissingGoal, doc.map_header.line, doc.map_header.column, "no G cell");
  if (!robot) return err(ParseErrorKind::MissingRobot, doc.map_header.line, doc.map_header.column, "no R cell");
  map->set_goal(goal->first, goal->second);
  s.start_room = robot->first;
  s.start = robot->second;

  const auto issues = grid::check_map(*map);
  if (!issues.empty()) {
    std::string msg = issues.front();
    for (std::size_t k = 1; k < issues.size(); ++k) msg += "; " + issues[k];
    return err(ParseErrorKind::TopologyMismatch, doc.map_header.line, doc.map_header.column, msg);
  }
  s.map = std::move(map);
  return doc;
}

std::string render_scenario(const nav::Scenario& s) {
  std::ostringstream os;
  os << "[map]\n";
  const grid::WorldMap& map = *s.map;
  for (const auto& band : map.layout()) {
    os << "rooms:";
    for (RoomId r : band) os << ' ' << grid::to_string(r);
    os << '\n';
    for (int y = 0; y < map.height(); ++y) {
      for (std::size_t k = 0; k < band.size(); ++k) {
        if (k) os << '|';
        const RoomId r = band[k];
        for (int x = 0; x < map.width(); ++x) {
          const GridPos p{x, y};
          char c = '#';
          switch (map.cell(r, p)) {
            case CellKind::Wall: c = '#'; break;
            case CellKind::Free: c = '.'; break;
            case CellKind::Goal: c = 'G'; break;
            case CellKind::Door: c = static_cast<char>('0' + map.door_at(r, p)->n); break;
          }
          if (r == s.start_room && p == s.start) c = 'R';
          os << c;
        }
      }
      os << '\n';
    }
  }
  for (const auto& w : map.doorways()) os << "pair: " << grid::to_string(w.a) << ' ' << grid::to_string(w.b) << '\n';

  os << "\n[params]\n";
  const nav::Scenario defaults;
  for (const Param& p : params()) {
    const std::string v = p.get(s);
    if (v == p.get(defaults)) os << "; ";
    os << p.key << " = " << v << '\n';
  }

  os << "\n[hierarchy]\n";
  for (const auto& [a, b] : s.wiring) os << "edge: n" << a << " -> n" << b << '\n';
  return os.str();
}

Result<ScenarioDoc, ParseError> load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ParseError{ParseErrorKind::Io, {1, 1}, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const Param& p : params()) out.push_back(p.key);
    return out;
  }();
  return keys;
}

}  // namespace cogh::config
