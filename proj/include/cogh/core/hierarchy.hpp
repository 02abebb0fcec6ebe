#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cogh/core/result.hpp"
#include "cogh/core/value.hpp"

namespace cogh {

struct NodeId {
  std::uint32_t value = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(NodeId id);

struct PlanOutput {
  Value policy;
  Value planning_state;
};

// The behaviour a concrete reasoning level supplies. Belief, policy, model and
// planning state are opaque values of the node's own spaces. Every function
// must be total and deterministic; any randomness travels inside the values.
class NodeInterface {
 public:
  virtual ~NodeInterface() = default;

  virtual std::string name() const = 0;

  virtual Value observation_update(const Value& belief, const ValueSet& observations) const = 0;
  virtual Value transition_apply(const Value& model, const Value& belief, const ValueSet& context,
                                 const ValueSet& actions) const = 0;
  virtual Value transition_learn(const Value& model, const Value& before, const ValueSet& context,
                                 const ValueSet& actions, const Value& after) const = 0;
  virtual Value utility_absorb(const Value& planning_state, const ValueSet& utilities) const = 0;
  virtual PlanOutput plan(const Value& policy, const Value& model, const ValueSet& tasks,
                          const Value& planning_state, const Value& belief) const = 0;
  virtual ValueSet policy_apply(const Value& policy, const Value& belief) const = 0;

  virtual Value initial_belief() const = 0;
  virtual Value initial_policy() const = 0;
  virtual Value initial_transition_model() const = 0;
  virtual Value initial_planning_state() const = 0;

  // Physical actuation. Only invoked for the world node during its action
  // update; returns the world state after executing the motor commands.
  virtual Value actuate(const Value& belief, const ValueSet& /*commands*/) const { return belief; }
};

using SensingFn = std::function<ValueSet(const Value& lower_belief)>;
using ContextFn = std::function<ValueSet(const Value& upper_belief)>;
using UtilityFn = std::function<ValueSet(const Value& lower_planning_state)>;
using TaskParamFn = std::function<ValueSet(const ValueSet& upper_actions)>;

// The four maps living on one edge. Sensing and utility point up the edge,
// context and task parameters point down it.
struct FunctionTuple {
  NodeId lower;
  NodeId upper;
  SensingFn sensing;
  ContextFn context;
  UtilityFn utility;
  TaskParamFn task_param;
};

// Function that returns the empty set; handy for the maps an edge leaves unused.
ValueSet no_values(const Value&);
ValueSet no_tasks(const ValueSet&);

enum class ViolationKind {
  UnknownEndpoint,
  SelfLoop,
  DuplicateEdge,
  MissingSensing,
  MissingTaskParam,
  Cycle,
  WorldHasInput,
  ExtraSource,
  MissingWorld,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<NodeId> nodes;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string str() const;
};

class Hierarchy {
 public:
  explicit Hierarchy(NodeId world) : world_(world) {}

  Hierarchy& add_node(NodeId id, std::shared_ptr<const NodeInterface> node);
  Hierarchy& add_edge(FunctionTuple edge);

  NodeId world() const noexcept { return world_; }
  const std::map<NodeId, std::shared_ptr<const NodeInterface>>& nodes() const noexcept { return nodes_; }
  const std::vector<FunctionTuple>& edges() const noexcept { return edges_; }
  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  const NodeInterface& node(NodeId id) const { return *nodes_.at(id); }

  // Edges whose upper end is `id`, ordered by lower node id.
  std::vector<const FunctionTuple*> edges_below(NodeId id) const;
  // Edges whose lower end is `id`, ordered by upper node id.
  std::vector<const FunctionTuple*> edges_above(NodeId id) const;

 private:
  NodeId world_;
  std::map<NodeId, std::shared_ptr<const NodeInterface>> nodes_;
  std::vector<FunctionTuple> edges_;
};

ValidationReport validate(const Hierarchy& hierarchy);

// Topological orders of the upward (sensing) and downward (task-parameter)
// graphs. Incomparable nodes come out in ascending id order.
Result<std::vector<NodeId>> topo_up(const Hierarchy& hierarchy);
Result<std::vector<NodeId>> topo_down(const Hierarchy& hierarchy);

struct ActiveNode {
  NodeId id;
  Value transition_model;
  Value policy;
  Value current_belief;    // CS
  Value predicted_belief;  // PUS
  Value corrected_belief;  // CUS
  Value planning_state;    // PS

  friend bool operator==(const ActiveNode&, const ActiveNode&) = default;
};

// A hierarchy together with one runtime record per node. Copying is cheap:
// the static hierarchy is shared and every slot is an immutable Value.
class ActiveHierarchy {
 public:
  // Initial active hierarchy: each node starts from its initial model, policy,
  // belief (in all three belief slots) and planning state.
  static Result<ActiveHierarchy> initial(std::shared_ptr<const Hierarchy> hierarchy);

  const Hierarchy& hierarchy() const noexcept { return *hierarchy_; }
  const std::shared_ptr<const Hierarchy>& shared_hierarchy() const noexcept { return hierarchy_; }

  const std::map<NodeId, ActiveNode>& nodes() const noexcept { return nodes_; }
  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  const ActiveNode& node(NodeId id) const { return nodes_.at(id); }

  // Returns a copy with node `id` replaced.
  ActiveHierarchy with_node(ActiveNode replacement) const;

  friend bool operator==(const ActiveHierarchy& a, const ActiveHierarchy& b) {
    return a.hierarchy_ == b.hierarchy_ && a.nodes_ == b.nodes_;
  }

 private:
  ActiveHierarchy(std::shared_ptr<const Hierarchy> hierarchy, std::map<NodeId, ActiveNode> nodes)
      : hierarchy_(std::move(hierarchy)), nodes_(std::move(nodes)) {}

  std::shared_ptr<const Hierarchy> hierarchy_;
  std::map<NodeId, ActiveNode> nodes_;
};

// Line-oriented text dump, one `node <id> CS=.. PUS=.. CUS=.. PS=..` line per node.
std::string dump(const ActiveHierarchy& ah);

}  // namespace cogh
