#include "cogh/core/hierarchy.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace cogh {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidHierarchy: return "InvalidHierarchy";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidCommand: return "InvalidCommand";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::Inapplicable: return "Inapplicable";
    case ErrorCode::NoPlan: return "NoPlan";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string to_string(NodeId id) { return "N" + std::to_string(id.value); }

ValueSet no_values(const Value&) { return {}; }
ValueSet no_tasks(const ValueSet&) { return {}; }

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::UnknownEndpoint: return "unknown-endpoint";
    case ViolationKind::SelfLoop: return "self-loop";
    case ViolationKind::DuplicateEdge: return "duplicate-edge";
    case ViolationKind::MissingSensing: return "missing-sensing";
    case ViolationKind::MissingTaskParam: return "missing-task-param";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::WorldHasInput: return "world-has-input";
    case ViolationKind::ExtraSource: return "extra-source";
    case ViolationKind::MissingWorld: return "missing-world";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << to_string(v.kind);
    for (const auto& n : v.nodes) os << ' ' << to_string(n);
    os << ": " << v.message << '\n';
  }
  return os.str();
}

Hierarchy& Hierarchy::add_node(NodeId id, std::shared_ptr<const NodeInterface> node) {
  nodes_[id] = std::move(node);
  return *this;
}

Hierarchy& Hierarchy::add_edge(FunctionTuple edge) {
  edges_.push_back(std::move(edge));
  return *this;
}

std::vector<const FunctionTuple*> Hierarchy::edges_below(NodeId id) const {
  std::vector<const FunctionTuple*> out;
  for (const auto& e : edges_)
    if (e.upper == id) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(),
                   [](const FunctionTuple* a, const FunctionTuple* b) { return a->lower < b->lower; });
  return out;
}

std::vector<const FunctionTuple*> Hierarchy::edges_above(NodeId id) const {
  std::vector<const FunctionTuple*> out;
  for (const auto& e : edges_)
    if (e.lower == id) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(),
                   [](const FunctionTuple* a, const FunctionTuple* b) { return a->upper < b->upper; });
  return out;
}

namespace {

using Adjacency = std::map<NodeId, std::set<NodeId>>;

// Kahn's algorithm with a min-heap so ties resolve by ascending id. Returns
// the nodes that could not be ordered (those on or behind a cycle) in `stuck`.
std::vector<NodeId> kahn(const std::vector<NodeId>& ids, const Adjacency& succ,
                         std::vector<NodeId>* stuck) {
  std::map<NodeId, int> indegree;
  for (auto id : ids) indegree[id] = 0;
  for (const auto& [from, tos] : succ)
    for (auto to : tos) ++indegree[to];

  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push(id);

  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId n = ready.top();
    ready.pop();
    order.push_back(n);
    auto it = succ.find(n);
    if (it == succ.end()) continue;
    for (auto to : it->second)
      if (--indegree[to] == 0) ready.push(to);
  }
  if (stuck) {
    stuck->clear();
    for (const auto& [id, deg] : indegree)
      if (deg > 0) stuck->push_back(id);
  }
  return order;
}

struct Graphs {
  Adjacency up;    // lower -> upper, from sensing maps
  Adjacency down;  // upper -> lower, from task-parameter maps
};

Graphs build_graphs(const Hierarchy& h) {
  Graphs g;
  for (const auto& e : h.edges()) {
    if (!h.contains(e.lower) || !h.contains(e.upper) || e.lower == e.upper) continue;
    if (e.sensing) g.up[e.lower].insert(e.upper);
    if (e.task_param) g.down[e.upper].insert(e.lower);
  }
  return g;
}

std::vector<NodeId> node_ids(const Hierarchy& h) {
  std::vector<NodeId> ids;
  for (const auto& [id, _] : h.nodes()) ids.push_back(id);
  return ids;
}

}  // namespace

ValidationReport validate(const Hierarchy& h) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::vector<NodeId> nodes, std::string msg) {
    report.violations.push_back({kind, std::move(nodes), std::move(msg)});
  };

  if (!h.contains(h.world())) {
    add(ViolationKind::MissingWorld, {h.world()}, "world node is not part of the hierarchy");
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : h.edges()) {
    if (!h.contains(e.lower) || !h.contains(e.upper)) {
      add(ViolationKind::UnknownEndpoint, {e.lower, e.upper}, "edge references a node that does not exist");
      continue;
    }
    if (e.lower == e.upper) {
      add(ViolationKind::SelfLoop, {e.lower}, "edge connects a node to itself");
      continue;
    }
    if (!seen.insert({e.lower, e.upper}).second)
      add(ViolationKind::DuplicateEdge, {e.lower, e.upper}, "edge declared more than once");
    if (!e.sensing)
      add(ViolationKind::MissingSensing, {e.lower, e.upper}, "edge has no sensing map; upward graph lacks it");
    if (!e.task_param)
      add(ViolationKind::MissingTaskParam, {e.lower, e.upper},
          "edge has no task-parameter map; downward graph is not the converse of the upward graph");
  }

  const Graphs g = build_graphs(h);
  const auto ids = node_ids(h);

  std::vector<NodeId> stuck;
  kahn(ids, g.up, &stuck);
  if (!stuck.empty()) add(ViolationKind::Cycle, stuck, "sensing edges contain a cycle");

  std::map<NodeId, int> indegree;
  for (auto id : ids) indegree[id] = 0;
  for (const auto& [from, tos] : g.up)
    for (auto to : tos) ++indegree[to];
  for (const auto& [id, deg] : indegree) {
    if (id == h.world()) {
      if (deg > 0) add(ViolationKind::WorldHasInput, {id}, "world node has an incoming sensing edge");
    } else if (deg == 0) {
      add(ViolationKind::ExtraSource, {id}, "node has no incoming sensing edge; world must be the unique source");
    }
  }
  return report;
}

Result<std::vector<NodeId>> topo_up(const Hierarchy& h) {
  const auto report = validate(h);
  if (!report.ok()) return make_error(ErrorCode::InvalidHierarchy, report.str());
  return kahn(node_ids(h), build_graphs(h).up, nullptr);
}

Result<std::vector<NodeId>> topo_down(const Hierarchy& h) {
  const auto report = validate(h);
  if (!report.ok()) return make_error(ErrorCode::InvalidHierarchy, report.str());
  return kahn(node_ids(h), build_graphs(h).down, nullptr);
}

Result<ActiveHierarchy> ActiveHierarchy::initial(std::shared_ptr<const Hierarchy> hierarchy) {
  const auto report = validate(*hierarchy);
  if (!report.ok()) return make_error(ErrorCode::InvalidHierarchy, report.str());
  std::map<NodeId, ActiveNode> nodes;
  for (const auto& [id, node] : hierarchy->nodes()) {
    const Value belief = node->initial_belief();
    nodes.emplace(id, ActiveNode{id, node->initial_transition_model(), node->initial_policy(), belief,
                                 belief, belief, node->initial_planning_state()});
  }
  return ActiveHierarchy(std::move(hierarchy), std::move(nodes));
}

ActiveHierarchy ActiveHierarchy::with_node(ActiveNode replacement) const {
  ActiveHierarchy out = *this;
  out.nodes_.at(replacement.id) = std::move(replacement);
  return out;
}

std::string dump(const ActiveHierarchy& ah) {
  std::ostringstream os;
  for (const auto& [id, n] : ah.nodes()) {
    os << "node " << to_string(id) << " CS=" << n.current_belief.str() << " PUS=" << n.predicted_belief.str()
       << " CUS=" << n.corrected_belief.str() << " PS=" << n.planning_state.str() << '\n';
  }
  return os.str();
}

}  // namespace cogh
